use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::sqrt;

use super::distance::{distribution_distance, distribution_distance_two_sample, histogram, DEFAULT_BINS, DEFAULT_RESAMPLES};
use super::reference::{pair_correlation, pair_correlation_reference, Surmise, PAIR_KERNEL_WIDTH};
use super::unfold::{bulk_gaps, unfold_points, BulkWindow};
use crate::ensemble::{flat_profile, sample_matrix, EntryLaw, SymmetryClass};
use crate::exec::{task_seed, Executor};
use crate::report::{Bound, ExperimentReport, Table};
use crate::spectral::{eigenvalues, SemicircleModel};
use crate::{rng, stats, Error, Result};

const LABEL_A: u64 = 0x4741_5041;
const LABEL_B: u64 = 0x4741_5042;

/// Pooled bulk unfolded gaps of `samples` flat Wigner spectra.
pub fn pooled_bulk_gaps<E: Executor>(exec: &E, law: &EntryLaw, n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let profile = flat_profile(n)?;
    let parts: Vec<Result<Vec<f64>>> = exec.map(samples, |k| {
        let h = sample_matrix(&profile, law, task_seed(seed, k));
        bulk_gaps(&eigenvalues(&h)?, BulkWindow::default())
    });
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

#[derive(Debug, Clone)]
pub struct GapComparisonConfig {
    pub id: String,
    pub law_a: EntryLaw,
    pub law_b: EntryLaw,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub ks_threshold: f64,
}

/// Two-sample comparison of the bulk gap laws of two Wigner ensembles.
pub fn compare_bulk_gaps<E: Executor>(exec: &E, cfg: &GapComparisonConfig) -> Result<ExperimentReport> {
    if cfg.samples == 0 || cfg.n < 10 {
        return Err(Error::invalid("need N ≥ 10 and at least one sample"));
    }
    let a = pooled_bulk_gaps(exec, &cfg.law_a, cfg.n, cfg.samples, rng::derive(cfg.seed, LABEL_A))?;
    let b = pooled_bulk_gaps(exec, &cfg.law_b, cfg.n, cfg.samples, rng::derive(cfg.seed, LABEL_B))?;
    let d = distribution_distance_two_sample(&a, &b, DEFAULT_BINS, DEFAULT_RESAMPLES, cfg.seed)?;
    let mut report = ExperimentReport::new(&cfg.id, cfg.seed, cfg.samples);
    report.param("N", cfg.n).param("law_a", cfg.law_a.tag()).param("law_b", cfg.law_b.tag());
    report.param("moments_a", fmt_moments(cfg.law_a.moments())).param("moments_b", fmt_moments(cfg.law_b.moments()));
    report.metric("gaps_a", a.len() as f64).metric("gaps_b", b.len() as f64);
    report.metric("mean_gap_a", stats::mean(&a)).metric("mean_gap_b", stats::mean(&b));
    report.metric_se("ks", d.ks, d.ks_radius / 1.96).metric_se("l1", d.l1, d.l1_radius / 1.96);
    report.check("bulk_gap_ks", d.ks, Bound::AtMost(cfg.ks_threshold));
    Ok(report)
}

fn fmt_moments(m: [f64; 4]) -> String {
    alloc::format!("{:.4}/{:.4}/{:.4}/{:.4}", m[0], m[1], m[2], m[3])
}

/// Histogram table with the fixed plotting columns.
pub fn histogram_table(name: &str, sample: &[f64], lo: f64, hi: f64, bins: usize) -> Table {
    let mut t = Table::new(name, &["bin_center", "value", "ci_low", "ci_high"]);
    for b in histogram(sample, lo, hi, bins) {
        t.push(alloc::vec![b.center, b.value, b.ci_low, b.ci_high]);
    }
    t
}

#[derive(Debug, Clone)]
pub struct SurmiseConfig {
    /// Number of 2×2 GOE draws.
    pub pairs: usize,
    pub n: usize,
    /// Number of `N × N` GOE spectra.
    pub samples: usize,
    pub seed: u64,
    pub exact_tol: f64,
    pub approx_tol: f64,
}

impl Default for SurmiseConfig {
    fn default() -> Self {
        Self { pairs: 100_000, n: 1000, samples: 20, seed: 0, exact_tol: 0.01, approx_tol: 0.05 }
    }
}

/// Gap of a 2×2 GOE matrix, rescaled to unit mean.
fn goe2_gap(seed: u64) -> f64 {
    let mut r = rng::stream(seed, 0);
    // Diagonal variance 1, off-diagonal 1/2: the gap has mean √π.
    let a = rng::normal(&mut r);
    let d = rng::normal(&mut r);
    let b = rng::normal(&mut r) * sqrt(0.5);
    sqrt((a - d) * (a - d) + 4.0 * b * b) / sqrt(PI)
}

/// 2×2 GOE gaps and large-`N` bulk gaps against the Wigner surmise.
pub fn surmise_experiment<E: Executor>(exec: &E, cfg: &SurmiseConfig) -> Result<ExperimentReport> {
    if cfg.pairs == 0 || cfg.samples == 0 {
        return Err(Error::invalid("need samples"));
    }
    let base = rng::derive(cfg.seed, LABEL_A);
    let small: Vec<f64> = exec.map(cfg.pairs, |k| goe2_gap(task_seed(base, k)));
    let bulk = pooled_bulk_gaps(exec, &EntryLaw::goe(), cfg.n, cfg.samples, rng::derive(cfg.seed, LABEL_B))?;
    let ds = distribution_distance(&small, &Surmise, DEFAULT_BINS, DEFAULT_RESAMPLES, cfg.seed)?;
    let db = distribution_distance(&bulk, &Surmise, DEFAULT_BINS, DEFAULT_RESAMPLES, cfg.seed)?;
    let mut report = ExperimentReport::new("surmise", cfg.seed, cfg.samples);
    report.param("pairs", cfg.pairs).param("N", cfg.n);
    report.metric_se("ks_2x2", ds.ks, ds.ks_radius / 1.96).metric("l1_2x2", ds.l1);
    report.metric_se("ks_bulk", db.ks, db.ks_radius / 1.96).metric("l1_bulk", db.l1);
    report.metric("mean_gap_bulk", stats::mean(&bulk));
    report.check("ks_2x2", ds.ks, Bound::AtMost(cfg.exact_tol));
    report.check("ks_bulk", db.ks, Bound::AtMost(cfg.approx_tol));
    report.table(histogram_table("gaps_2x2", &small, 0.0, 4.0, DEFAULT_BINS));
    report.table(histogram_table("gaps_bulk", &bulk, 0.0, 4.0, DEFAULT_BINS));
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct PairCorrelationConfig {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub r_max: f64,
    pub width: f64,
    pub l1_tol: f64,
    /// Total number of i.i.d. points in the Poisson control.
    pub poisson_points: usize,
    pub flat_tol: f64,
}

impl Default for PairCorrelationConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            samples: 20,
            seed: 0,
            r_max: 3.0,
            width: PAIR_KERNEL_WIDTH,
            l1_tol: 0.1,
            poisson_points: 200_000,
            flat_tol: 0.05,
        }
    }
}

fn poisson_sets(points: usize, seed: u64) -> Vec<Vec<f64>> {
    const PER_SET: usize = 10_000;
    let sets = points.div_ceil(PER_SET);
    (0..sets)
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            (0..PER_SET).map(|_| PER_SET as f64 * rng::uniform(&mut r)).collect()
        })
        .collect()
}

/// GUE bulk two-point function against `1 − K(r)²`, with a Poisson control.
pub fn pair_correlation_experiment<E: Executor>(exec: &E, cfg: &PairCorrelationConfig) -> Result<ExperimentReport> {
    if cfg.samples == 0 {
        return Err(Error::invalid("need samples"));
    }
    let profile = flat_profile(cfg.n)?;
    let law = EntryLaw::gue();
    let base = rng::derive(cfg.seed, LABEL_A);
    let sets: Vec<Result<Vec<f64>>> = exec.map(cfg.samples, |k| {
        let h = sample_matrix(&profile, &law, task_seed(base, k));
        Ok(unfold_points(&eigenvalues(&h)?, &SemicircleModel, BulkWindow::default()))
    });
    let sets: Vec<Vec<f64>> = sets.into_iter().collect::<Result<_>>()?;
    let curve = pair_correlation(&sets, cfg.r_max, cfg.width)?;
    let poisson = pair_correlation(&poisson_sets(cfg.poisson_points, rng::derive(cfg.seed, LABEL_B)), cfg.r_max, cfg.width)?;
    let l1 = curve.l1_to(pair_correlation_reference);
    let flat = poisson.sup_deviation_from(1.0);
    let mut report = ExperimentReport::new("pair-correlation", cfg.seed, cfg.samples);
    report.param("N", cfg.n).param("class", "GUE").param("width", cfg.width).param("r_max", cfg.r_max);
    report.metric("reference_points", curve.reference_points as f64);
    report.metric("first_bin", curve.values[0]);
    report.metric("l1_sine", l1).metric("poisson_sup_dev", flat);
    report.check("l1_to_sine_kernel", l1, Bound::AtMost(cfg.l1_tol));
    report.check("poisson_flat", flat, Bound::AtMost(cfg.flat_tol));
    let mut t = Table::new("pair_correlation", &["r", "value", "stderr", "reference", "poisson"]);
    for b in 0..curve.centers.len() {
        let r = curve.centers[b];
        t.push(alloc::vec![r, curve.values[b], curve.stderr[b], pair_correlation_reference(r), poisson.values[b]]);
    }
    report.table(t);
    Ok(report)
}

/// The three-point law `{±√3: 1/6, 0: 2/3}` shares four moments with the Gaussian.
pub fn four_moment_config(n: usize, samples: usize, seed: u64) -> Result<GapComparisonConfig> {
    let class = SymmetryClass::RealSymmetric;
    Ok(GapComparisonConfig {
        id: "four-moment".into(),
        law_a: crate::ensemble::four_moment_law(0.0, 3.0, class)?,
        law_b: EntryLaw::gaussian(class),
        n,
        samples,
        seed,
        ks_threshold: 0.05,
    })
}
