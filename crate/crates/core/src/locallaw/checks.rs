use alloc::vec::Vec;
use libm::{fabs, pow};

use super::identities::check_resolvent_identities;
use crate::ensemble::{flat_profile, sample_matrix, EntryLaw};
use crate::exec::{task_seed, Executor};
use crate::gapstats::histogram_table;
use crate::report::{Bound, ExperimentReport, Table};
use crate::spectral::{eigenvalues, semicircle_counting, semicircle_stieltjes};
use crate::{Error, Result, C64};

#[derive(Debug, Clone)]
pub struct IdentitiesConfig {
    pub n: usize,
    pub samples: usize,
    /// Points per side of the spectral-parameter grid for the `m` identity.
    pub grid: usize,
    pub seed: u64,
    pub m_tol: f64,
    pub resolvent_tol: f64,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        Self { n: 50, samples: 10, grid: 100, seed: 0, m_tol: 1e-12, resolvent_tol: 1e-8 }
    }
}

/// `|m + 1/m + z| / max(|m|, 1/|m|, |z|)` at one spectral parameter.
pub fn m_identity_residual(z: C64) -> Result<f64> {
    let m = semicircle_stieltjes(z)?;
    let scale = m.norm().max(m.inv().norm()).max(z.norm());
    Ok((m + m.inv() + z).norm() / scale)
}

/// Residuals of the semicircle self-consistency and of the exact resolvent identities.
pub fn identities_experiment<E: Executor>(exec: &E, cfg: &IdentitiesConfig) -> Result<ExperimentReport> {
    if cfg.n < 4 || cfg.samples == 0 || cfg.grid == 0 {
        return Err(Error::invalid("need N ≥ 4, samples and a grid"));
    }
    let mut worst_m = 0.0f64;
    for a in 0..cfg.grid {
        let e = -3.0 + 6.0 * (a as f64 + 0.5) / cfg.grid as f64;
        let eta = pow(10.0, -4.0 + 5.0 * a as f64 / cfg.grid as f64);
        worst_m = worst_m.max(m_identity_residual(C64::new(e, eta))?);
    }
    let profile = flat_profile(cfg.n)?;
    let n = cfg.n;
    let rows: Vec<Result<[f64; 6]>> = exec.map(cfg.samples, |k| {
        let law = if k % 2 == 0 { EntryLaw::goe() } else { EntryLaw::gue() };
        let h = sample_matrix(&profile, &law, task_seed(cfg.seed, k));
        let z = C64::new(-1.5 + 0.3 * k as f64, 0.05 + 0.1 * k as f64);
        let mut worst = [0.0f64; 6];
        // Plain resolvent and a minor with two indices removed.
        for (i, j, q, t) in [(0, 1, 2, alloc::vec![]), (n - 1, 3, n / 2, alloc::vec![5, 7])] {
            let r = check_resolvent_identities(&h, z, i, j, q, &t)?;
            let vals = [r.expansion_entry, r.expansion_inverse, r.column_left, r.column_right, r.schur, r.ward];
            for (w, v) in worst.iter_mut().zip(vals) {
                *w = w.max(v);
            }
        }
        Ok(worst)
    });
    let rows: Vec<[f64; 6]> = rows.into_iter().collect::<Result<_>>()?;
    let names = ["expansion_entry", "expansion_inverse", "column_left", "column_right", "schur", "ward"];
    let mut table = Table::new("per_sample", &["sample", names[0], names[1], names[2], names[3], names[4], names[5]]);
    for (k, r) in rows.iter().enumerate() {
        let mut row = alloc::vec![k as f64];
        row.extend_from_slice(r);
        table.push(row);
    }
    let mut report = ExperimentReport::new("identities", cfg.seed, cfg.samples);
    report.param("N", n).param("grid", cfg.grid);
    report.check("m_identity", worst_m, Bound::AtMost(cfg.m_tol));
    for (c, name) in names.iter().enumerate() {
        let worst = rows.iter().map(|r| r[c]).fold(0.0, f64::max);
        report.check(name, worst, Bound::AtMost(cfg.resolvent_tol));
    }
    report.table(table);
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SemicircleConfig {
    pub law: EntryLaw,
    pub n: usize,
    pub samples: usize,
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
    pub l1_tol: f64,
}

impl Default for SemicircleConfig {
    fn default() -> Self {
        Self { law: EntryLaw::goe(), n: 2000, samples: 5, bins: 40, lo: -2.2, hi: 2.2, seed: 0, l1_tol: 0.05 }
    }
}

/// Histogram of pooled eigenvalues against the bin averages of `ρ_sc`.
pub fn semicircle_experiment<E: Executor>(exec: &E, cfg: &SemicircleConfig) -> Result<ExperimentReport> {
    if cfg.samples == 0 || cfg.bins == 0 || !(cfg.hi > cfg.lo) {
        return Err(Error::invalid("need samples, bins and a non-empty range"));
    }
    let profile = flat_profile(cfg.n)?;
    let spectra: Vec<Result<Vec<f64>>> =
        exec.map(cfg.samples, |k| eigenvalues(&sample_matrix(&profile, &cfg.law, task_seed(cfg.seed, k))));
    let mut pooled = Vec::with_capacity(cfg.n * cfg.samples);
    for s in spectra {
        pooled.extend(s?);
    }
    let hist = histogram_table("histogram", &pooled, cfg.lo, cfg.hi, cfg.bins);
    let w = (cfg.hi - cfg.lo) / cfg.bins as f64;
    let centers = hist.column("bin_center").unwrap_or_default();
    let values = hist.column("value").unwrap_or_default();
    let mut l1 = 0.0;
    for (c, v) in centers.iter().zip(&values) {
        let exact = semicircle_counting(c + 0.5 * w) - semicircle_counting(c - 0.5 * w);
        l1 += fabs(v * w - exact);
    }
    let mut report = ExperimentReport::new("semicircle", cfg.seed, cfg.samples);
    report.param("law", cfg.law.tag()).param("N", cfg.n).param("bins", cfg.bins);
    report.check("l1_to_semicircle", l1, Bound::AtMost(cfg.l1_tol));
    report.table(hist);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn m_identity_near_edges_and_far_away() {
        for z in [C64::new(2.0, 1e-6), C64::new(-2.0, 1e-9), C64::new(0.0, 1e3), C64::new(50.0, 0.1)] {
            assert!(m_identity_residual(z).unwrap() < 1e-13);
        }
    }

    #[test]
    fn small_identity_run_passes() {
        let cfg = IdentitiesConfig { n: 12, samples: 2, grid: 10, ..IdentitiesConfig::default() };
        let r = identities_experiment(&Sequential, &cfg).unwrap();
        assert!(r.passed(), "{}", r.verdict());
        assert_eq!(r.checks.len(), 7);
    }

    #[test]
    fn small_semicircle_run() {
        let cfg = SemicircleConfig { n: 300, samples: 2, bins: 20, l1_tol: 0.1, ..SemicircleConfig::default() };
        let r = semicircle_experiment(&Sequential, &cfg).unwrap();
        assert!(r.passed(), "{}", r.verdict());
    }
}
