use alloc::format;
use alloc::vec::Vec;
use libm::{log, pow, sqrt};

use super::empirical::empirical_t;
use super::theory::{theta_exact, theta_fourier_approx};
use crate::ensemble::{band_profile, EntryLaw, Shape};
use crate::exec::{task_seed, Executor};
use crate::report::{Bound, ExperimentReport, Table};
use crate::spectral::semicircle_stieltjes;
use crate::{Error, Result, C64};

#[derive(Debug, Clone)]
pub struct Figure1Config {
    pub w: usize,
    /// `N/W`.
    pub ratio: usize,
    /// Exponents `k` of `η = 5^{−k}`.
    pub ks: Vec<u32>,
    pub energy: f64,
    pub shape: Shape,
    /// Allowed factor on the peak and flat heights.
    pub height_factor: f64,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self { w: 16, ratio: 25, ks: alloc::vec![1, 2, 3, 4, 5], energy: 0.0, shape: Shape::Uniform, height_factor: 3.0 }
    }
}

fn within_factor(name: &str, ratio: f64, factor: f64, report: &mut ExperimentReport) {
    report.check(name, log(ratio).abs(), Bound::AtMost(log(factor)));
}

/// Curves `η·θ_x` and `log θ_x` for `η = 5^{−k}`, the two panels of the spreading picture.
pub fn figure1_report(cfg: &Figure1Config) -> Result<ExperimentReport> {
    if cfg.ks.is_empty() || cfg.ratio == 0 {
        return Err(Error::invalid("need at least one k and a positive N/W"));
    }
    let n = cfg.w * cfg.ratio;
    let s = band_profile(n, cfg.w, cfg.shape)?;
    let crossover = pow(cfg.w as f64 / n as f64, 2.0);
    let mut report = ExperimentReport::new("band-figure", 0, 0);
    report.param("W", cfg.w).param("N", n).param("E", cfg.energy).param("shape", cfg.shape.id());
    let mut curves = Table::new("figure1", &["k", "eta", "x", "eta_theta", "log_theta", "crossover"]);
    for &k in &cfg.ks {
        let eta = pow(5.0, -(k as f64));
        let th = theta_exact(&s, C64::new(cfg.energy, eta))?;
        let is_cross = ((eta / crossover) - 1.0).abs() < 1e-9;
        for (x, t) in th.centred() {
            curves.push(alloc::vec![k as f64, eta, x as f64, eta * t, log(t), is_cross as u8 as f64]);
        }
        report.metric(&format!("peak_k{k}"), th.peak());
        report.metric(&format!("flatness_k{k}"), th.flatness());
        if eta >= 25.0 * crossover {
            // Sharply peaked regime.
            within_factor(&format!("peak_height_k{k}"), th.peak() * cfg.w as f64 * sqrt(eta), cfg.height_factor, &mut report);
        } else if eta < crossover {
            within_factor(&format!("flat_height_k{k}"), th.peak() * n as f64 * eta, cfg.height_factor, &mut report);
        }
        if is_cross {
            report.note(format!("k = {k} is the crossover η = (W/N)²"));
        }
    }
    report.table(curves);
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct BandConfig {
    pub w: usize,
    pub n: usize,
    pub energy: f64,
    pub shape: Shape,
    pub law: EntryLaw,
    /// Spectral parameters at which `T` is compared with `Θ`.
    pub etas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// `c` in the tolerance `max(0.1, c/(Nη))`.
    pub l1_constant: f64,
    pub mass_tol: f64,
    /// Spectral parameter below the crossover where flatness is checked.
    pub flat_eta: f64,
    pub flat_tol: f64,
    /// Smaller torus on which the empirical profile is also checked for
    /// flatness at `η = (W/N)²/5`, closer to the delocalized regime.
    pub flat_small_n: Option<usize>,
    pub figure: Figure1Config,
}

impl BandConfig {
    pub fn standard(seed: u64) -> Self {
        Self {
            w: 16,
            n: 400,
            energy: 0.0,
            shape: Shape::Uniform,
            law: EntryLaw::gue(),
            etas: (1..=4).map(|k| pow(5.0, -(k as f64))).collect(),
            samples: 400,
            seed,
            l1_constant: 3.0,
            mass_tol: 0.1,
            flat_eta: pow(5.0, -5.0),
            flat_tol: 1.2,
            flat_small_n: Some(64),
            figure: Figure1Config::default(),
        }
    }
}

/// Sample-averaged `T` against the exact profile `Θ`, the mass identity and flatness.
pub fn band_experiment<E: Executor>(exec: &E, cfg: &BandConfig) -> Result<ExperimentReport> {
    if cfg.etas.is_empty() {
        return Err(Error::invalid("empty η grid"));
    }
    let s = band_profile(cfg.n, cfg.w, cfg.shape)?;
    let n = cfg.n as f64;
    let mut report = ExperimentReport::new("band", cfg.seed, cfg.samples * (cfg.etas.len() + 2));
    report
        .param("W", cfg.w)
        .param("N", cfg.n)
        .param("E", cfg.energy)
        .param("shape", cfg.shape.id())
        .param("law", cfg.law.tag());
    let mut table = Table::new("profile", &["eta", "x", "theta_exact", "theta_approx", "T_empirical", "stderr"]);
    let mut grid = cfg.etas.clone();
    grid.push(cfg.flat_eta);
    for (a, &eta) in grid.iter().enumerate() {
        let z = C64::new(cfg.energy, eta);
        let ex = theta_exact(&s, z)?;
        let ap = theta_fourier_approx(cfg.w, cfg.shape, cfg.energy, eta, cfg.n)?;
        let emp = empirical_t(exec, &s, &cfg.law, z, cfg.samples, task_seed(cfg.seed, a), None)?;
        for x in 0..cfg.n {
            let d = ex.offset(x) as f64;
            table.push(alloc::vec![eta, d, ex.theta[x], ap.theta[x], emp.theta[x], emp.stderr[x]]);
        }
        let im_m = semicircle_stieltjes(z)?.im;
        let tag = format!("eta{eta:.5}");
        let l1 = emp.relative_l1(&ex)?;
        report.metric(&format!("approx_l1_{tag}"), ap.relative_l1(&ex)?);
        report.metric(&format!("empirical_mass_ratio_{tag}"), emp.mass * eta / im_m);
        report.metric(&format!("empirical_flatness_{tag}"), emp.flatness());
        if a < cfg.etas.len() {
            report.check(&format!("l1_{tag}"), l1, Bound::AtMost(f64::max(0.1, cfg.l1_constant / (n * eta))));
            report.check(&format!("mass_{tag}"), ex.mass * eta / im_m, Bound::Within { target: 1.0, tol: cfg.mass_tol });
        } else {
            report.metric(&format!("l1_{tag}"), l1);
            report.check("flat_theta", ex.flatness(), Bound::AtMost(cfg.flat_tol));
            report.observe("flat_empirical", emp.flatness(), Bound::AtMost(cfg.flat_tol));
        }
    }
    if let Some(ns) = cfg.flat_small_n {
        let small = band_profile(ns, cfg.w, cfg.shape)?;
        let eta = pow(cfg.w as f64 / ns as f64, 2.0) / 5.0;
        let z = C64::new(cfg.energy, eta);
        let emp = empirical_t(exec, &small, &cfg.law, z, cfg.samples, task_seed(cfg.seed, grid.len()), None)?;
        report.param("flat_small_N", ns);
        report.check("flat_empirical_small_N", emp.flatness(), Bound::AtMost(cfg.flat_tol));
    }
    report.table(table);
    report.absorb("figure", figure1_report(&cfg.figure)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn figure_marks_crossover_and_heights() {
        let r = figure1_report(&Figure1Config::default()).unwrap();
        assert!(r.passed(), "{}", r.verdict());
        let t = &r.tables[0];
        let cross = t.column("crossover").unwrap();
        let ks = t.column("k").unwrap();
        assert!(ks.iter().zip(&cross).all(|(k, c)| (*c == 1.0) == (*k == 4.0)));
        assert!(r.get_check("peak_height_k1").is_some());
        assert!(r.get_check("flat_height_k5").is_some());
    }

    #[test]
    fn small_band_run_has_all_checks() {
        let mut cfg = BandConfig::standard(3);
        cfg.n = 96;
        cfg.w = 8;
        cfg.samples = 20;
        cfg.etas = alloc::vec![0.2];
        cfg.flat_eta = 0.001;
        cfg.flat_small_n = Some(16);
        let r = band_experiment(&Sequential, &cfg).unwrap();
        assert!(r.get_check("l1_eta0.20000").is_some());
        assert!(r.get_check("flat_theta").is_some());
        assert!(r.get_check("flat_empirical_small_N").is_some());
        assert_eq!(r.tables[0].rows.len(), 2 * 96);
    }
}
