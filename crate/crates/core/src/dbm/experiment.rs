use alloc::vec::Vec;
use libm::sqrt;

use super::flow::matrix_ou_flow;
use super::sde::{dbm_integrate, FlowConfig, ParticleState};
use crate::ensemble::{flat_profile, sample_matrix, EntryLaw, MatrixSample, ProfileKind, SymmetryClass};
use crate::exec::{task_seed, Executor};
use crate::gapstats::{bulk_gaps, distribution_distance_two_sample, BulkWindow, DEFAULT_BINS, DEFAULT_RESAMPLES};
use crate::report::{Bound, ExperimentReport, Table};
use crate::spectral::eigenvalues;
use crate::{rng, stats, Error, Result};

/// Two-sample KS radius at roughly the 99% level.
pub const INVARIANCE_CONSTANT: f64 = 1.95;

#[derive(Debug, Clone)]
pub struct RelaxationConfig {
    /// Law of the initial matrix `H_0`.
    pub law: EntryLaw,
    pub n: usize,
    pub times: Vec<f64>,
    /// Time at which the KS bound is gated; must be one of `times`.
    pub gated_time: f64,
    pub samples: usize,
    /// Number of GOE/GUE spectra in the reference pool.
    pub reference_samples: usize,
    pub seed: u64,
    pub ks_threshold: f64,
    /// Also flow an equilibrium start to `gated_time` and compare to the pool.
    pub invariance: bool,
}

impl RelaxationConfig {
    /// `t = N^{−1/2}`, 50 spectra on each side.
    pub fn standard(law: EntryLaw, n: usize, seed: u64) -> Self {
        let t = 1.0 / sqrt(n as f64);
        Self {
            law,
            n,
            times: alloc::vec![0.0, 0.25 * t, 0.5 * t, t, 2.0 * t],
            gated_time: t,
            samples: 50,
            reference_samples: 50,
            seed,
            ks_threshold: 0.05,
            invariance: true,
        }
    }
}

fn equilibrium(class: SymmetryClass) -> EntryLaw {
    match class {
        SymmetryClass::RealSymmetric => EntryLaw::goe(),
        SymmetryClass::ComplexHermitian => EntryLaw::gue(),
    }
}

const REFERENCE_LABEL: u64 = 0x5245_4600;
const INVARIANCE_LABEL: u64 = 0x494e_5600;
const NOISE_LABEL: u64 = 0x4e4f_4900;

fn pooled_gaps<E: Executor, F>(exec: &E, count: usize, make: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<MatrixSample> + Sync + Send,
{
    let parts: Vec<Result<Vec<f64>>> = exec.map(count, |k| {
        let h = make(k)?;
        bulk_gaps(&eigenvalues(&h)?, BulkWindow::default())
    });
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// Bulk-gap distance to the GOE/GUE law along the matrix OU flow from `H_0`.
pub fn relaxation_experiment<E: Executor>(exec: &E, cfg: &RelaxationConfig) -> Result<ExperimentReport> {
    if cfg.n < 10 || cfg.samples == 0 || cfg.reference_samples == 0 || cfg.times.is_empty() {
        return Err(Error::invalid("need N ≥ 10, samples and a time grid"));
    }
    if !cfg.times.iter().any(|&t| t == cfg.gated_time) {
        return Err(Error::invalid("gated time must be on the time grid"));
    }
    let class = cfg.law.class();
    let profile = flat_profile(cfg.n)?;
    let eq = equilibrium(class);
    let reference = pooled_gaps(exec, cfg.reference_samples, |k| {
        Ok(sample_matrix(&profile, &eq, task_seed(rng::derive(cfg.seed, REFERENCE_LABEL), k)))
    })?;
    let mut report = ExperimentReport::new("dbm", cfg.seed, cfg.samples);
    report.param("N", cfg.n).param("law", cfg.law.tag()).param("gated_t", cfg.gated_time);
    report.param("reference_samples", cfg.reference_samples);
    let mut table = Table::new("relaxation", &["t", "ks", "ks_ci", "l1", "mean_delta"]);
    for (ti, &t) in cfg.times.iter().enumerate() {
        let gaps = pooled_gaps(exec, cfg.samples, |k| {
            let seed = task_seed(cfg.seed, k);
            let h0 = sample_matrix(&profile, &cfg.law, seed);
            matrix_ou_flow(&h0, t, rng::derive(seed, NOISE_LABEL))
        })?;
        let d = distribution_distance_two_sample(
            &gaps,
            &reference,
            DEFAULT_BINS,
            DEFAULT_RESAMPLES,
            rng::derive(cfg.seed, ti as u64),
        )?;
        table.push(alloc::vec![t, d.ks, d.ks_radius, d.l1, d.mean_delta]);
        if t == cfg.gated_time {
            report.metric_se("ks_gated", d.ks, d.ks_radius / 1.96);
            report.check("ks_at_gated_t", d.ks, Bound::AtMost(cfg.ks_threshold));
        }
        if t == 0.0 {
            report.metric("ks_initial", d.ks);
        }
    }
    report.table(table);
    if cfg.invariance {
        let base = rng::derive(cfg.seed, INVARIANCE_LABEL);
        let gaps = pooled_gaps(exec, cfg.samples, |k| {
            let seed = task_seed(base, k);
            let h0 = sample_matrix(&profile, &eq, seed);
            matrix_ou_flow(&h0, cfg.gated_time, rng::derive(seed, NOISE_LABEL))
        })?;
        let ks = stats::ks_two_sample(&gaps, &reference);
        let (na, nb) = (gaps.len() as f64, reference.len() as f64);
        let bound = INVARIANCE_CONSTANT * sqrt((na + nb) / (na * nb));
        report.metric("ks_invariance", ks);
        report.check("equilibrium_start_invariant", ks, Bound::AtMost(bound));
    }
    report.note("reference pool: independent GOE/GUE spectra; gaps from the 10%–90% bulk window");
    Ok(report)
}

fn two_level_start(class: SymmetryClass) -> Result<MatrixSample> {
    let h = match class {
        SymmetryClass::RealSymmetric => MatrixSample::diagonal(&[-0.5, 0.5]),
        SymmetryClass::ComplexHermitian => {
            MatrixSample::from_complex(2, alloc::vec![-0.5, 0.0, 0.0, 0.5], alloc::vec![0.0; 4])?
        }
    };
    Ok(h.with_profile(ProfileKind::Flat))
}

/// `N = 2` gaps at matrix time `t` from the eigenvalue SDE and from the
/// matrix flow, started at `diag(−½, ½)`.
///
/// The SDE runs for time `2t/β` since its noise is normalised per eigenvalue.
pub fn sde_flow_gaps<E: Executor>(
    exec: &E,
    class: SymmetryClass,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let beta = class.beta();
    let start = two_level_start(class)?;
    let x0 = ParticleState::new(alloc::vec![-0.5, 0.5])?;
    let cfg = FlowConfig::new(beta, 2.0 * t / beta, 0)?;
    let sde: Vec<Result<f64>> = exec.map(samples, |k| {
        let x = dbm_integrate(&x0, &FlowConfig { seed: task_seed(seed, k), ..cfg })?;
        Ok(x.positions()[1] - x.positions()[0])
    });
    let flow_seed = rng::derive(seed, NOISE_LABEL);
    let flow: Vec<Result<f64>> = exec.map(samples, |k| {
        let h = matrix_ou_flow(&start, t, task_seed(flow_seed, k))?;
        let l = eigenvalues(&h)?;
        Ok(l[1] - l[0])
    });
    Ok((sde.into_iter().collect::<Result<_>>()?, flow.into_iter().collect::<Result<_>>()?))
}

/// Two-sample KS between the SDE and matrix-flow gap laws at `N = 2`.
pub fn sde_consistency_experiment<E: Executor>(
    exec: &E,
    class: SymmetryClass,
    t: f64,
    samples: usize,
    seed: u64,
    ks_threshold: f64,
) -> Result<ExperimentReport> {
    let (sde, flow) = sde_flow_gaps(exec, class, t, samples, seed)?;
    let mut report = ExperimentReport::new("dbm-sde", seed, samples);
    report.param("beta", class.beta()).param("t_matrix", t).param("t_sde", 2.0 * t / class.beta());
    let ks = stats::ks_two_sample(&sde, &flow);
    report.metric("mean_gap_sde", stats::mean(&sde)).metric("mean_gap_flow", stats::mean(&flow));
    report.metric("ks", ks);
    report.check("sde_vs_flow_ks", ks, Bound::AtMost(ks_threshold));
    Ok(report)
}
