use alloc::vec::Vec;
use libm::{ceil, erf, exp, log, pow, sqrt};

use super::conditional::{good_set_check, ConditionalSpec, CONVEXITY_CONSTANT};
use super::equilibrium::equilibrium_model;
use super::mcmc::{equilibrium_start, run_pool, ChainPool, GasTarget, McmcConfig};
use super::potential::{BetaSpec, Potential};
use super::tridiag::tridiagonal_sample;
use crate::exec::{task_seed, Executor};
use crate::gapstats::{distribution_distance_two_sample, DEFAULT_BINS, DEFAULT_RESAMPLES};
use crate::report::{Bound, ExperimentReport, Table};
use crate::spectral::{DensityModel, SemicircleModel};
use crate::{quad, rng, stats, Error, Result};

const LABEL_TRI: u64 = 0x5452_4900;
const LABEL_MCMC: u64 = 0x4d43_4d00;
const LABEL_N1: u64 = 0x4e31_0000;
const LABEL_N2: u64 = 0x4e32_0000;

/// Chain settings shared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSettings {
    pub chains: usize,
    pub burn_in: usize,
    pub thinning: usize,
}

impl Default for ChainSettings {
    fn default() -> Self {
        Self { chains: 8, burn_in: 2000, thinning: 5 }
    }
}

/// Run chains until every observable has at least `target` effective samples
/// (at most four rounds, each rescaling the chain length).
fn pool_with_ess<E: Executor>(
    exec: &E,
    target: &GasTarget,
    init: &[f64],
    settings: ChainSettings,
    ess_target: usize,
    seed: u64,
    observables: &[fn(&[f64]) -> f64],
) -> Result<(ChainPool, f64)> {
    let mut per_chain = (ess_target / settings.chains).max(100);
    let mut last = None;
    for round in 0..4 {
        let cfg = McmcConfig {
            samples: per_chain,
            burn_in: settings.burn_in,
            thinning: settings.thinning,
            seed: rng::derive(seed, round),
        };
        let pool = run_pool(exec, target, init, &cfg, settings.chains)?;
        let ess = observables.iter().map(|&f| pool.effective_samples(f)).fold(f64::INFINITY, f64::min);
        if ess >= ess_target as f64 {
            return Ok((pool, ess));
        }
        per_chain = ceil(per_chain as f64 * 1.2 * ess_target as f64 / ess.max(1.0)) as usize;
        last = Some((pool, ess));
    }
    Ok(last.expect("at least one round"))
}

fn normal_cdf(x: f64, var: f64) -> f64 {
    0.5 * (1.0 + erf(x / sqrt(2.0 * var)))
}

/// CDF of the two-particle gap density `∝ s^β e^{−βs²/4}`.
fn pair_gap_cdf(beta: f64) -> impl Fn(f64) -> f64 {
    let pdf = move |s: f64| pow(s, beta) * exp(-beta * s * s / 4.0);
    let z = quad::integrate(pdf, 0.0, 40.0 / sqrt(beta), 1e-13);
    move |s: f64| if s <= 0.0 { 0.0 } else { quad::integrate(pdf, 0.0, s, 1e-11) / z }
}

fn largest(x: &[f64]) -> f64 {
    x[x.len() - 1]
}

fn central_gap(x: &[f64]) -> f64 {
    let m = x.len() / 2;
    x[m] - x[m - 1]
}

fn first_gap(x: &[f64]) -> f64 {
    x[1] - x[0]
}

fn only(x: &[f64]) -> f64 {
    x[0]
}

#[derive(Debug, Clone)]
pub struct XvalConfig {
    pub n: usize,
    pub beta: f64,
    /// Tridiagonal draws and MCMC effective-sample target.
    pub samples: usize,
    pub chains: ChainSettings,
    pub seed: u64,
    pub ks_tol: f64,
    pub n1_tol: f64,
    pub n2_tol: f64,
}

impl Default for XvalConfig {
    fn default() -> Self {
        Self {
            n: 8,
            beta: 2.0,
            samples: 10_000,
            chains: ChainSettings { chains: 8, burn_in: 2000, thinning: 10 },
            seed: 0,
            ks_tol: 0.05,
            n1_tol: 0.02,
            n2_tol: 0.03,
        }
    }
}

/// Tridiagonal and Metropolis samplers against each other and against the
/// `N = 1` and `N = 2` closed forms.
pub fn cross_validation_experiment<E: Executor>(exec: &E, cfg: &XvalConfig) -> Result<ExperimentReport> {
    if cfg.n < 2 || cfg.samples == 0 {
        return Err(Error::invalid("need N ≥ 2 and samples"));
    }
    let mut report = ExperimentReport::new("loggas-xval", cfg.seed, cfg.samples);
    report.param("N", cfg.n).param("beta", cfg.beta).param("thinning", cfg.chains.thinning);
    let beta = cfg.beta;

    let tri = |n: usize, label: u64| -> Result<Vec<Vec<f64>>> {
        let base = rng::derive(cfg.seed, label ^ LABEL_TRI);
        exec.map(cfg.samples, |k| tridiagonal_sample(n, beta, task_seed(base, k)).map(|s| s.into_eigenvalues()))
            .into_iter()
            .collect()
    };
    let mcmc = |n: usize, label: u64, obs: &[fn(&[f64]) -> f64]| -> Result<(ChainPool, f64)> {
        let spec = BetaSpec::gaussian(n, beta)?;
        let init = equilibrium_start(&spec)?;
        pool_with_ess(exec, &GasTarget::global(&spec), &init, cfg.chains, cfg.samples, rng::derive(cfg.seed, label ^ LABEL_MCMC), obs)
    };

    // N = 1: density ∝ e^{−βx²/4}.
    let var = 2.0 / beta;
    let t1: Vec<f64> = tri(1, LABEL_N1)?.iter().map(|x| x[0]).collect();
    let (p1, ess1) = mcmc(1, LABEL_N1, &[only])?;
    let m1 = p1.observable(only);
    report.metric("ess_n1", ess1);
    report.check("n1_tridiagonal_ks", stats::ks_statistic(&t1, |x| normal_cdf(x, var)), Bound::AtMost(cfg.n1_tol));
    report.check("n1_mcmc_ks", stats::ks_statistic(&m1, |x| normal_cdf(x, var)), Bound::AtMost(cfg.n1_tol));

    // N = 2: gap density ∝ s^β e^{−βs²/4}.
    let cdf = pair_gap_cdf(beta);
    let t2: Vec<f64> = tri(2, LABEL_N2)?.iter().map(|x| first_gap(x)).collect();
    let (p2, ess2) = mcmc(2, LABEL_N2, &[first_gap])?;
    let m2 = p2.observable(first_gap);
    report.metric("ess_n2", ess2);
    report.check("n2_tridiagonal_ks", stats::ks_statistic(&t2, &cdf), Bound::AtMost(cfg.n2_tol));
    report.check("n2_mcmc_ks", stats::ks_statistic(&m2, &cdf), Bound::AtMost(cfg.n2_tol));

    // General N: the two samplers against each other.
    let tn = tri(cfg.n, 0)?;
    let (pn, essn) = mcmc(cfg.n, 0, &[largest, central_gap])?;
    let tmax: Vec<f64> = tn.iter().map(|x| largest(x)).collect();
    let tgap: Vec<f64> = tn.iter().map(|x| central_gap(x)).collect();
    let (mmax, mgap) = (pn.observable(largest), pn.observable(central_gap));
    report.metric("ess", essn).metric("acceptance", pn.acceptance());
    let dmax = distribution_distance_two_sample(&tmax, &mmax, DEFAULT_BINS, DEFAULT_RESAMPLES, cfg.seed)?;
    let dgap = distribution_distance_two_sample(&tgap, &mgap, DEFAULT_BINS, DEFAULT_RESAMPLES, cfg.seed)?;
    report.metric_se("ks_lambda_max", dmax.ks, dmax.ks_radius / 1.96);
    report.metric_se("ks_central_gap", dgap.ks, dgap.ks_radius / 1.96);
    report.check("lambda_max_ks", dmax.ks, Bound::AtMost(cfg.ks_tol));
    report.check("central_gap_ks", dgap.ks, Bound::AtMost(cfg.ks_tol));
    report.observe("effective_samples", essn.min(ess1).min(ess2), Bound::AtLeast(cfg.samples as f64));
    Ok(report)
}

/// Window `⟦first, last⟧` of `kappa` particles centred in `1..=n`.
pub fn centred_window(n: usize, kappa: usize) -> (usize, usize) {
    let first = (n - kappa) / 2 + 1;
    (first, first + kappa - 1)
}

/// Classical locations `γ_k`, `k = 1..=N`, of the semicircle.
pub fn classical_configuration(n: usize) -> Vec<f64> {
    (1..=n).map(|k| SemicircleModel.classical_location(k, n)).collect()
}

/// All `𝒦 + 1` gaps of the window including the two boundary gaps.
fn window_gaps(x: &[f64], lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
    core::iter::once(x[0] - lo).chain(x.windows(2).map(|w| w[1] - w[0])).chain(core::iter::once(hi - x[x.len() - 1]))
}

#[derive(Debug, Clone)]
pub struct RepulsionConfig {
    pub n: usize,
    pub kappa: usize,
    pub beta: f64,
    /// Retained configurations in total.
    pub samples: usize,
    pub chains: ChainSettings,
    pub seed: u64,
    pub s_min: f64,
    pub s_max: f64,
    pub grid: usize,
    /// Grid points with fewer small-gap events are left out of the fit.
    pub min_events: usize,
    pub slope_tol: f64,
}

impl RepulsionConfig {
    pub fn new(beta: f64, seed: u64) -> Self {
        Self {
            n: 200,
            kappa: 8,
            beta,
            samples: 400_000,
            chains: ChainSettings { chains: 8, burn_in: 2000, thinning: 2 },
            seed,
            s_min: 0.02,
            s_max: 0.2,
            grid: 10,
            min_events: 20,
            slope_tol: if beta <= 1.0 { 0.3 } else { 0.4 },
        }
    }
}

/// Small-gap tail of the conditioned Gaussian gas with classical boundary data.
pub fn level_repulsion_experiment<E: Executor>(exec: &E, cfg: &RepulsionConfig) -> Result<ExperimentReport> {
    if cfg.grid < 2 || !(0.0 < cfg.s_min && cfg.s_min < cfg.s_max) || cfg.chains.chains == 0 {
        return Err(Error::invalid("bad s grid or chain settings"));
    }
    let (first, last) = centred_window(cfg.n, cfg.kappa);
    let cond = ConditionalSpec::from_configuration(&classical_configuration(cfg.n), first, last, Potential::quadratic())?;
    let (lo, hi) = cond.interval();
    let unfold = cfg.n as f64 * SemicircleModel.density(cond.midpoint());
    let mc = McmcConfig {
        samples: cfg.samples.div_ceil(cfg.chains.chains),
        burn_in: cfg.chains.burn_in,
        thinning: cfg.chains.thinning,
        seed: cfg.seed,
    };
    let pool = run_pool(exec, &cond.target(cfg.beta)?, &cond.alphas(), &mc, cfg.chains.chains)?;
    let gaps: Vec<f64> = pool.samples().flat_map(|x| window_gaps(x, lo, hi).map(|g| g * unfold).collect::<Vec<_>>()).collect();
    let total = gaps.len() as f64;
    let sorted = stats::sorted(&gaps);
    let mut report = ExperimentReport::new("repulsion", cfg.seed, pool.samples().count());
    report.param("N", cfg.n).param("kappa", cfg.kappa).param("beta", cfg.beta).param("boundary", "classical");
    report.metric("gaps", total).metric("acceptance", pool.acceptance());
    report.metric("ess_first_gap", pool.effective_samples(first_gap));
    let mut table = Table::new("small_gap_cdf", &["s", "count", "cdf"]);
    let (mut xs, mut ys, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..cfg.grid {
        let s = cfg.s_min * pow(cfg.s_max / cfg.s_min, k as f64 / (cfg.grid - 1) as f64);
        let count = sorted.partition_point(|&g| g <= s);
        table.push(alloc::vec![s, count as f64, count as f64 / total]);
        if count >= cfg.min_events {
            xs.push(log(s));
            ys.push(log(count as f64 / total));
            ws.push(count as f64);
        }
    }
    report.table(table);
    report.metric("fit_points", xs.len() as f64);
    if xs.len() < 3 {
        report.note("too few small-gap events for the log-log fit");
        report.check("small_gap_slope", f64::NAN, Bound::Within { target: cfg.beta + 1.0, tol: cfg.slope_tol });
        return Ok(report);
    }
    let fit = stats::weighted_linear_fit(&xs, &ys, &ws)?;
    report.metric_se("slope", fit.slope, fit.slope_se);
    report.check("small_gap_slope", fit.slope, Bound::Within { target: cfg.beta + 1.0, tol: cfg.slope_tol });
    // Inverse-gap moment of order β/2 and its stability when the sample is halved.
    let p = 0.5 * cfg.beta;
    let moment = |g: &[f64]| stats::mean(&g.iter().map(|&x| pow(x, -p)).collect::<Vec<_>>());
    let full = moment(&gaps);
    let half = moment(&gaps[..gaps.len() / 2]);
    report.metric("inverse_moment", full);
    report.observe("inverse_moment_drift", (full - half).abs() / full, Bound::AtMost(0.1));
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct LocalRigidityConfig {
    pub n: usize,
    /// `K`; the window has `2K + 1` particles.
    pub k: usize,
    pub beta: f64,
    pub samples: usize,
    pub chains: ChainSettings,
    pub seed: u64,
}

impl Default for LocalRigidityConfig {
    fn default() -> Self {
        Self { n: 200, k: 4, beta: 1.0, samples: 40_000, chains: ChainSettings::default(), seed: 0 }
    }
}

/// Fluctuations of the interior particles around `α_j` for symmetric classical boundary data.
pub fn local_rigidity_experiment<E: Executor>(exec: &E, cfg: &LocalRigidityConfig) -> Result<ExperimentReport> {
    let l = cfg.n / 2;
    let cond = ConditionalSpec::symmetric(&classical_configuration(cfg.n), l, cfg.k, Potential::quadratic())?;
    let kappa = cond.kappa();
    let mc = McmcConfig {
        samples: cfg.samples.div_ceil(cfg.chains.chains.max(1)),
        burn_in: cfg.chains.burn_in,
        thinning: cfg.chains.thinning,
        seed: cfg.seed,
    };
    let pool = run_pool(exec, &cond.target(cfg.beta)?, &cond.alphas(), &mc, cfg.chains.chains)?;
    let mut report = ExperimentReport::new("local-rigidity", cfg.seed, pool.samples().count());
    report.param("N", cfg.n).param("kappa", kappa).param("beta", cfg.beta);
    let centre = pool.observable(|x| x[x.len() / 2]);
    let ybar = cond.midpoint();
    let dev: Vec<f64> = centre.iter().map(|x| x - ybar).collect();
    let sigma = stats::std_dev(&dev);
    report.metric("centre_sd_times_n", sigma * cfg.n as f64);
    let mut table = Table::new("exceedance", &["u", "empirical", "gaussian"]);
    for u in [1.0, 2.0, 3.0] {
        let rate = dev.iter().filter(|d| d.abs() > u * sigma).count() as f64 / dev.len() as f64;
        table.push(alloc::vec![u, rate, 1.0 - erf(u / sqrt(2.0))]);
        if u == 3.0 {
            report.check("exceed_3sd", rate, Bound::AtMost(0.01));
        }
    }
    report.table(table);
    let alphas = cond.alphas();
    let worst = (0..kappa)
        .map(|j| (stats::mean(&pool.observable(|x| x[j])) - alphas[j]).abs())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    report.metric("ex_margin_times_n", worst * cfg.n as f64);
    report.check("mean_vs_alpha", worst, Bound::AtMost(0.1 * cond.length() / kappa as f64));
    report.observe("convexity_margin", cond.convexity_margin(CONVEXITY_CONSTANT, 1000), Bound::AtLeast(0.0));
    Ok(report)
}

/// One side of a local gap comparison.
#[derive(Debug, Clone)]
pub struct LocalSide {
    pub cond: ConditionalSpec,
    pub beta: f64,
}

#[derive(Debug, Clone)]
pub struct GapUniversalityConfig {
    pub a: LocalSide,
    pub b: LocalSide,
    pub samples: usize,
    pub chains: ChainSettings,
    pub seed: u64,
    pub ks_tol: f64,
    /// Largest relative difference of `|J|` accepted before matching.
    pub mismatch_tol: f64,
    /// Good-set parameters used for reporting.
    pub xi: f64,
    pub alpha: f64,
}

fn side_report<E: Executor>(
    exec: &E,
    side: &LocalSide,
    cfg: &GapUniversalityConfig,
    label: u64,
    report: &mut ExperimentReport,
    name: &str,
) -> Result<(Vec<f64>, f64)> {
    let c = &side.cond;
    let model = equilibrium_model(c.potential())?;
    let rho = model.density(c.midpoint());
    report.metric(&alloc::format!("{name}_jlen_ratio"), c.n() as f64 * c.length() * rho / c.kappa() as f64);
    let good = good_set_check(c, &model, cfg.xi, cfg.alpha);
    report.observe(&alloc::format!("{name}_good_margin"), good.worst_margin, Bound::AtLeast(0.0));
    let mc = McmcConfig {
        samples: cfg.samples.div_ceil(cfg.chains.chains.max(1)),
        burn_in: cfg.chains.burn_in,
        thinning: cfg.chains.thinning,
        seed: rng::derive(cfg.seed, label),
    };
    let pool = run_pool(exec, &c.target(side.beta)?, &c.alphas(), &mc, cfg.chains.chains)?;
    let alphas = c.alphas();
    let ex = (0..c.kappa())
        .map(|j| (stats::mean(&pool.observable(|x| x[j])) - alphas[j]).abs())
        .fold(0.0, f64::max);
    report.metric(&alloc::format!("{name}_ex_margin_times_n"), ex * c.n() as f64);
    report.metric(&alloc::format!("{name}_acceptance"), pool.acceptance());
    let ess = pool.effective_samples(central_gap);
    report.metric(&alloc::format!("{name}_ess"), ess);
    // Affine image on the unit-spacing scale of J: gap·(𝒦 + 1)/|J|.
    let scale = (c.kappa() + 1) as f64 / c.length();
    Ok((pool.observable(central_gap).iter().map(|g| g * scale).collect(), ess))
}

/// Central unfolded gap of two conditioned gases after affine matching of `J`.
pub fn gap_universality_experiment<E: Executor>(exec: &E, cfg: &GapUniversalityConfig) -> Result<ExperimentReport> {
    let (a, b) = (&cfg.a.cond, &cfg.b.cond);
    if a.kappa() != b.kappa() {
        return Err(Error::invalid("windows must have the same number of particles"));
    }
    let mismatch = (a.length() - b.length()).abs() / a.length().max(b.length());
    if mismatch > cfg.mismatch_tol {
        return Err(Error::invalid(alloc::format!("interval lengths differ by {mismatch:.3} (relative)")));
    }
    let mut report = ExperimentReport::new("gap-local", cfg.seed, cfg.samples);
    report.param("kappa", a.kappa()).param("beta_a", cfg.a.beta).param("beta_b", cfg.b.beta);
    report.param("potential_a", a.potential().tag()).param("potential_b", b.potential().tag());
    report.metric("length_mismatch", mismatch);
    let (ga, ea) = side_report(exec, &cfg.a, cfg, 1, &mut report, "a")?;
    let (gb, eb) = side_report(exec, &cfg.b, cfg, 2, &mut report, "b")?;
    let d = distribution_distance_two_sample(&ga, &gb, DEFAULT_BINS, DEFAULT_RESAMPLES, cfg.seed)?;
    let se = sqrt(stats::variance(&ga) / ea + stats::variance(&gb) / eb);
    report.metric_se("ks", d.ks, d.ks_radius / 1.96);
    report.metric("ks_ci_radius", d.ks_radius);
    report.metric_se("mean_delta", d.mean_delta, se);
    report.metric("mean_gap_a", stats::mean(&ga)).metric("mean_gap_b", stats::mean(&gb));
    report.check("central_gap_ks", d.ks, Bound::AtMost(cfg.ks_tol));
    report.note("bootstrap radii treat chain samples as independent; ESS is reported separately");
    Ok(report)
}

/// Boundary data from exact Gaussian β-ensemble draws that pass the good-set test.
pub fn good_boundary_draws<E: Executor>(
    exec: &E,
    n: usize,
    beta: f64,
    l: usize,
    k: usize,
    xi: f64,
    alpha: f64,
    count: usize,
    max_tries: usize,
    seed: u64,
) -> Result<(Vec<ConditionalSpec>, usize)> {
    let candidates: Vec<Result<Option<ConditionalSpec>>> = exec.map(max_tries, |t| {
        let lam = tridiagonal_sample(n, beta, task_seed(seed, t))?.into_eigenvalues();
        let c = ConditionalSpec::symmetric(&lam, l, k, Potential::quadratic())?;
        Ok(good_set_check(&c, &SemicircleModel, xi, alpha).good.then_some(c))
    });
    let mut out = Vec::new();
    let mut good = 0;
    for c in candidates {
        if let Some(c) = c? {
            good += 1;
            if out.len() < count {
                out.push(c);
            }
        }
    }
    if out.len() < count {
        return Err(Error::InsufficientData(alloc::format!("{good} good boundaries in {max_tries} draws")));
    }
    Ok((out, good))
}

#[derive(Debug, Clone)]
pub struct LocalGapConfig {
    pub n: usize,
    pub k: usize,
    pub beta: f64,
    pub xi: f64,
    pub alpha: f64,
    pub samples: usize,
    pub chains: ChainSettings,
    pub draws: usize,
    pub seed: u64,
    pub ks_tol: f64,
}

impl Default for LocalGapConfig {
    fn default() -> Self {
        Self {
            n: 400,
            k: 8,
            beta: 1.0,
            xi: 1.0,
            alpha: 0.1,
            samples: 40_000,
            chains: ChainSettings { chains: 8, burn_in: 2000, thinning: 5 },
            draws: 200,
            seed: 0,
            ks_tol: 0.05,
        }
    }
}

/// Two independent good boundary draws, same `V`, compared on a matched `J`.
pub fn local_gap_experiment<E: Executor>(exec: &E, cfg: &LocalGapConfig) -> Result<ExperimentReport> {
    let (sides, good) =
        good_boundary_draws(exec, cfg.n, cfg.beta, cfg.n / 2, cfg.k, cfg.xi, cfg.alpha, 2, cfg.draws, cfg.seed)?;
    let side = |c: &ConditionalSpec| LocalSide { cond: c.clone(), beta: cfg.beta };
    let ucfg = GapUniversalityConfig {
        a: side(&sides[0]),
        b: side(&sides[1]),
        samples: cfg.samples,
        chains: cfg.chains,
        seed: cfg.seed,
        ks_tol: cfg.ks_tol,
        mismatch_tol: 0.5,
        xi: cfg.xi,
        alpha: cfg.alpha,
    };
    let mut report = gap_universality_experiment(exec, &ucfg)?;
    report.param("N", cfg.n).param("xi", cfg.xi);
    report.metric("good_fraction", good as f64 / cfg.draws as f64);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn small_cross_validation() {
        let cfg = XvalConfig {
            n: 4,
            samples: 3000,
            chains: ChainSettings { chains: 4, burn_in: 500, thinning: 5 },
            seed: 3,
            ks_tol: 0.08,
            n1_tol: 0.04,
            n2_tol: 0.05,
            ..XvalConfig::default()
        };
        let r = cross_validation_experiment(&Sequential, &cfg).unwrap();
        assert!(r.passed(), "{}", r.verdict());
    }

    #[test]
    fn repulsion_slope_beta_one() {
        let mut cfg = RepulsionConfig::new(1.0, 2);
        cfg.n = 60;
        cfg.samples = 60_000;
        let r = level_repulsion_experiment(&Sequential, &cfg).unwrap();
        assert!(r.passed(), "{}", r.verdict());
    }

    #[test]
    fn local_rigidity_small() {
        let cfg = LocalRigidityConfig { n: 100, samples: 10_000, ..LocalRigidityConfig::default() };
        let r = local_rigidity_experiment(&Sequential, &cfg).unwrap();
        assert!(r.passed(), "{}", r.verdict());
    }

    #[test]
    fn same_boundary_twice_is_consistent() {
        let c = ConditionalSpec::symmetric(&classical_configuration(100), 50, 4, Potential::quadratic()).unwrap();
        let side = LocalSide { cond: c, beta: 2.0 };
        let cfg = GapUniversalityConfig {
            a: side.clone(),
            b: side,
            samples: 8000,
            chains: ChainSettings { chains: 4, burn_in: 500, thinning: 5 },
            seed: 1,
            ks_tol: 0.05,
            mismatch_tol: 0.1,
            xi: 1.0,
            alpha: 0.1,
        };
        let r = gap_universality_experiment(&Sequential, &cfg).unwrap();
        assert!(r.passed(), "{}", r.verdict());
        assert!(r.get_metric("length_mismatch").unwrap() == 0.0);
    }

    #[test]
    fn quadratic_and_quartic_gaps_agree() {
        let n = 120;
        let quartic = Potential::quartic(1.0, 1.0).unwrap();
        let model = equilibrium_model(&quartic).unwrap();
        let lam_q: Vec<f64> = (1..=n).map(|k| model.quantile((k as f64 - 0.5) / n as f64)).collect();
        let lam_g: Vec<f64> = (1..=n).map(|k| SemicircleModel.quantile((k as f64 - 0.5) / n as f64)).collect();
        let a = ConditionalSpec::symmetric(&lam_g, n / 2, 4, Potential::quadratic()).unwrap();
        let b = ConditionalSpec::symmetric(&lam_q, n / 2, 4, quartic).unwrap();
        let cfg = GapUniversalityConfig {
            a: LocalSide { cond: a, beta: 1.0 },
            b: LocalSide { cond: b, beta: 1.0 },
            samples: 16_000,
            chains: ChainSettings { chains: 4, burn_in: 500, thinning: 5 },
            seed: 4,
            ks_tol: 0.05,
            mismatch_tol: 0.5,
            xi: 1.0,
            alpha: 0.1,
        };
        let r = gap_universality_experiment(&Sequential, &cfg).unwrap();
        let mean = r.get_metric("mean_gap_a").unwrap();
        assert!(r.get_metric("mean_delta").unwrap().abs() < 0.05 * mean, "{}", r.verdict());
    }
}
