use alloc::vec::Vec;
use libm::{log, pow, sqrt};

use crate::ensemble::{sample_matrix, EntryLaw, MatrixSample, ProfileSpec, VarianceProfile};
use crate::exec::{task_seed, Executor};
use crate::report::{Bound, ExperimentReport, Table};
use crate::spectral::{
    classical_location, control_params, eigen_decompose, eigenvalues, resolvent, semicircle_counting,
    semicircle_stieltjes, ResolventMode,
};
use crate::{rng, stats, Error, Result, C64};

/// How the spectral parameter's imaginary part depends on `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaRule {
    /// `η = N^p`.
    Power(f64),
    Fixed(f64),
}

impl EtaRule {
    pub fn eta(&self, n: usize) -> f64 {
        match *self {
            EtaRule::Power(p) => pow(n as f64, p),
            EtaRule::Fixed(eta) => eta,
        }
    }
}

impl core::fmt::Display for EtaRule {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EtaRule::Power(p) => write!(f, "N^{p}"),
            EtaRule::Fixed(eta) => write!(f, "{eta}"),
        }
    }
}

fn size_seed(seed: u64, n: usize) -> u64 {
    rng::derive(seed, n as u64)
}

fn draw(profile: &VarianceProfile, law: &EntryLaw, seed: u64) -> MatrixSample {
    sample_matrix(profile, law, seed)
}

fn check_sizes(sizes: &[usize], samples: usize) -> Result<()> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::invalid("size list must be non-empty and positive"));
    }
    if samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LscConfig {
    pub profile: ProfileSpec,
    pub law: EntryLaw,
    pub sizes: Vec<usize>,
    pub energy: f64,
    pub eta: EtaRule,
    pub samples: usize,
    pub seed: u64,
    /// Tolerance on both regression slopes.
    pub slope_tol: f64,
}

/// Deviation of `m_N` and of the resolvent entries from the semicircle across sizes.
pub fn lsc_scaling_experiment<E: Executor>(exec: &E, cfg: &LscConfig) -> Result<ExperimentReport> {
    check_sizes(&cfg.sizes, cfg.samples)?;
    let profiles: Vec<VarianceProfile> = cfg.sizes.iter().map(|&n| cfg.profile.build(n)).collect::<Result<_>>()?;
    let tasks = cfg.sizes.len() * cfg.samples;
    let rows: Vec<Result<[f64; 7]>> = exec.map(tasks, |t| {
        let (a, k) = (t / cfg.samples, t % cfg.samples);
        let n = cfg.sizes[a];
        let p = &profiles[a];
        let h = draw(p, &cfg.law, task_seed(size_seed(cfg.seed, n), k));
        let eta = cfg.eta.eta(n);
        let r = resolvent(&h, C64::new(cfg.energy, eta), ResolventMode::Full)?;
        let c = control_params(&r, p)?;
        Ok([eta, p.m() * eta, c.pi, c.theta_dev, c.lambda, c.lambda_o, c.lambda_d])
    });
    let mut per_seed = Table::new("per_seed", &["N", "sample", "eta", "M_eta", "Pi", "theta_dev", "Lambda", "Lambda_o", "Lambda_d"]);
    let mut per_n = Table::new("per_N", &["N", "eta", "M_eta", "Pi", "median_theta_dev", "max_theta_dev", "median_Lambda", "max_Lambda"]);
    let mut report = ExperimentReport::new("lsc", cfg.seed, tasks);
    report.param("profile", cfg.profile.tag()).param("law", cfg.law.tag()).param("E", cfg.energy).param("eta", cfg.eta);
    let (mut x_meta, mut x_pi, mut y_theta, mut y_lambda) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (a, &n) in cfg.sizes.iter().enumerate() {
        let block: Vec<[f64; 7]> = rows[a * cfg.samples..(a + 1) * cfg.samples].iter().cloned().collect::<Result<_>>()?;
        for (k, r) in block.iter().enumerate() {
            let mut row = alloc::vec![n as f64, k as f64];
            row.extend_from_slice(r);
            per_seed.push(row);
        }
        let col = |i: usize| block.iter().map(|r| r[i]).collect::<Vec<f64>>();
        let (theta, lambda) = (col(3), col(4));
        let (eta, meta, pi) = (block[0][0], block[0][1], block[0][2]);
        let (mt, ml) = (stats::median(&theta), stats::median(&lambda));
        per_n.push(alloc::vec![n as f64, eta, meta, pi, mt, stats::max(&theta), ml, stats::max(&lambda)]);
        x_meta.push(log(meta));
        x_pi.push(log(pi));
        y_theta.push(log(mt));
        y_lambda.push(log(ml));
        if let EtaRule::Fixed(eta) = cfg.eta {
            if eta >= 1.0 {
                report.check(&alloc::format!("max_Lambda_N{n}"), stats::max(&lambda), Bound::AtMost(10.0 / sqrt(profiles[a].m())));
            }
        }
    }
    if cfg.sizes.len() >= 2 && matches!(cfg.eta, EtaRule::Power(_)) {
        let ft = stats::linear_fit(&x_meta, &y_theta)?;
        let fl = stats::linear_fit(&x_pi, &y_lambda)?;
        let fm = stats::linear_fit(&x_meta, &y_lambda)?;
        report.metric_se("slope_theta_vs_Meta", ft.slope, ft.slope_se);
        report.metric_se("slope_Lambda_vs_Pi", fl.slope, fl.slope_se);
        report.metric_se("slope_Lambda_vs_Meta", fm.slope, fm.slope_se);
        report.check("slope_theta_vs_Meta", ft.slope, Bound::Within { target: -1.0, tol: cfg.slope_tol });
        report.check("slope_Lambda_vs_Pi", fl.slope, Bound::Within { target: 1.0, tol: cfg.slope_tol });
        report.observe("slope_Lambda_vs_Meta", fm.slope, Bound::Within { target: -0.5, tol: cfg.slope_tol });
    }
    report.table(per_n);
    report.table(per_seed);
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct RigidityConfig {
    pub profile: ProfileSpec,
    pub law: EntryLaw,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Allowance `c` in the bounds `c · log N`.
    pub log_factor: f64,
}

/// Per-sample rigidity statistics of a sorted spectrum against the semicircle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidityStats {
    /// `max_{N/4 ≤ j ≤ 3N/4} N |λ_j − γ_j|`.
    pub bulk_max: f64,
    /// `max_j N^{2/3} ĵ^{1/3} |λ_j − γ_j|` with `ĵ = min(j, N + 1 − j)`.
    pub scaled_max: f64,
    pub scaled_median: f64,
    /// `N sup_E |𝔫_N(E) − n(E)|`.
    pub counting_sup: f64,
}

pub fn rigidity_stats(lambda: &[f64]) -> Result<RigidityStats> {
    let n = lambda.len();
    let nf = n as f64;
    let mut bulk_max = 0.0f64;
    let mut scaled = Vec::with_capacity(n);
    let mut counting_sup = 0.0f64;
    for (idx, &l) in lambda.iter().enumerate() {
        let j = idx + 1;
        let dev = (l - classical_location(j, n)?).abs();
        if 4 * j >= n && 4 * j <= 3 * n {
            bulk_max = bulk_max.max(nf * dev);
        }
        let jhat = j.min(n + 1 - j) as f64;
        scaled.push(pow(nf, 2.0 / 3.0) * pow(jhat, 1.0 / 3.0) * dev);
        // The empirical counting function jumps from (j−1)/N to j/N at λ_j.
        let c = semicircle_counting(l);
        counting_sup = counting_sup.max((c - idx as f64 / nf).abs()).max((c - j as f64 / nf).abs());
    }
    Ok(RigidityStats { bulk_max, scaled_max: stats::max(&scaled), scaled_median: stats::median(&scaled), counting_sup: nf * counting_sup })
}

pub fn rigidity_experiment<E: Executor>(exec: &E, cfg: &RigidityConfig) -> Result<ExperimentReport> {
    check_sizes(&cfg.sizes, cfg.samples)?;
    let profiles: Vec<VarianceProfile> = cfg.sizes.iter().map(|&n| cfg.profile.build(n)).collect::<Result<_>>()?;
    let tasks = cfg.sizes.len() * cfg.samples;
    let rows: Vec<Result<RigidityStats>> = exec.map(tasks, |t| {
        let (a, k) = (t / cfg.samples, t % cfg.samples);
        let n = cfg.sizes[a];
        let h = draw(&profiles[a], &cfg.law, task_seed(size_seed(cfg.seed, n), k));
        rigidity_stats(&eigenvalues(&h)?)
    });
    let mut report = ExperimentReport::new("rigidity", cfg.seed, tasks);
    report.param("profile", cfg.profile.tag()).param("law", cfg.law.tag());
    let mut per_seed = Table::new("per_seed", &["N", "sample", "bulk_max", "scaled_max", "scaled_median", "counting_sup"]);
    let mut per_n = Table::new("per_N", &["N", "max_bulk", "median_bulk", "max_counting", "max_scaled"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (a, &n) in cfg.sizes.iter().enumerate() {
        let block: Vec<RigidityStats> = rows[a * cfg.samples..(a + 1) * cfg.samples].iter().cloned().collect::<Result<_>>()?;
        for (k, s) in block.iter().enumerate() {
            per_seed.push(alloc::vec![n as f64, k as f64, s.bulk_max, s.scaled_max, s.scaled_median, s.counting_sup]);
        }
        let bulk: Vec<f64> = block.iter().map(|s| s.bulk_max).collect();
        let count: Vec<f64> = block.iter().map(|s| s.counting_sup).collect();
        let scaled: Vec<f64> = block.iter().map(|s| s.scaled_max).collect();
        per_n.push(alloc::vec![n as f64, stats::max(&bulk), stats::median(&bulk), stats::max(&count), stats::max(&scaled)]);
        let allowance = cfg.log_factor * log(n as f64);
        report.check(&alloc::format!("max_bulk_N{n}"), stats::max(&bulk), Bound::AtMost(allowance));
        report.check(&alloc::format!("max_counting_N{n}"), stats::max(&count), Bound::AtMost(allowance));
        xs.push(log(n as f64));
        ys.push(log(stats::median(&bulk)));
    }
    if cfg.sizes.len() >= 2 {
        let fit = stats::linear_fit(&xs, &ys)?;
        report.metric_se("growth_exponent_bulk", fit.slope, fit.slope_se);
        report.check("growth_exponent_bulk", fit.slope, Bound::AtMost(0.1));
    }
    report.table(per_n);
    report.table(per_seed);
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct DelocConfig {
    pub profile: ProfileSpec,
    pub law: EntryLaw,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub log_factor: f64,
}

/// `N · max_i |u_α(i)|²` for every eigenvector of `h`.
pub fn delocalization_stats(h: &MatrixSample) -> Result<Vec<f64>> {
    eigen_decompose(h, true)?.sup_norms_scaled()
}

pub fn delocalization_experiment<E: Executor>(exec: &E, cfg: &DelocConfig) -> Result<ExperimentReport> {
    check_sizes(&cfg.sizes, cfg.samples)?;
    let profiles: Vec<VarianceProfile> = cfg.sizes.iter().map(|&n| cfg.profile.build(n)).collect::<Result<_>>()?;
    let tasks = cfg.sizes.len() * cfg.samples;
    let rows: Vec<Result<(f64, f64)>> = exec.map(tasks, |t| {
        let (a, k) = (t / cfg.samples, t % cfg.samples);
        let n = cfg.sizes[a];
        let h = draw(&profiles[a], &cfg.law, task_seed(size_seed(cfg.seed, n), k));
        let s = delocalization_stats(&h)?;
        // Bulk statistic: median over the middle half of the spectrum.
        let bulk: Vec<f64> = s[n / 4..(3 * n) / 4].to_vec();
        Ok((stats::max(&s), stats::median(&bulk)))
    });
    let mut report = ExperimentReport::new("deloc", cfg.seed, tasks);
    report.param("profile", cfg.profile.tag()).param("law", cfg.law.tag());
    let mut per_seed = Table::new("per_seed", &["N", "sample", "max_sup", "bulk_median_sup"]);
    for (a, &n) in cfg.sizes.iter().enumerate() {
        let block: Vec<(f64, f64)> = rows[a * cfg.samples..(a + 1) * cfg.samples].iter().cloned().collect::<Result<_>>()?;
        for (k, s) in block.iter().enumerate() {
            per_seed.push(alloc::vec![n as f64, k as f64, s.0, s.1]);
        }
        let maxes: Vec<f64> = block.iter().map(|s| s.0).collect();
        let bulk: Vec<f64> = block.iter().map(|s| s.1).collect();
        report.metric(&alloc::format!("bulk_median_N{n}"), stats::median(&bulk));
        report.check(&alloc::format!("max_sup_N{n}"), stats::max(&maxes), Bound::AtMost(cfg.log_factor * log(n as f64)));
    }
    // Localized control: distinct diagonal entries give standard basis vectors.
    let n0 = cfg.sizes[0];
    let diag: Vec<f64> = (0..n0).map(|i| i as f64 / n0 as f64).collect();
    let control = stats::max(&delocalization_stats(&MatrixSample::diagonal(&diag))?);
    report.check("diagonal_control", control, Bound::Within { target: n0 as f64, tol: 1e-9 * n0 as f64 });
    report.table(per_seed);
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct FlucAvgConfig {
    pub profile: ProfileSpec,
    pub law: EntryLaw,
    pub n: usize,
    pub energy: f64,
    /// Sweep of spectral parameters; all share the same samples.
    pub etas: Vec<EtaRule>,
    /// Index into `etas` at which the ratio bound is gated.
    pub primary: usize,
    pub samples: usize,
    pub seed: u64,
    pub ratio_factor: f64,
    pub slope_tol: f64,
}

fn complex_std(xs: &[C64]) -> f64 {
    let n = xs.len() as f64;
    let mu = xs.iter().sum::<C64>() / n;
    sqrt(xs.iter().map(|x| (x - mu).norm_sqr()).sum::<f64>() / (n - 1.0))
}

/// Compare sample fluctuations of the average `[v]` with those of single `v_i`.
pub fn fluctuation_averaging_experiment<E: Executor>(exec: &E, cfg: &FlucAvgConfig) -> Result<ExperimentReport> {
    if cfg.samples < 2 || cfg.etas.is_empty() || cfg.primary >= cfg.etas.len() {
        return Err(Error::invalid("need ≥ 2 samples and a primary index inside the η sweep"));
    }
    let n = cfg.n;
    let profile = cfg.profile.build(n)?;
    let zs: Vec<C64> = cfg.etas.iter().map(|r| C64::new(cfg.energy, r.eta(n))).collect();
    let ms: Vec<C64> = zs.iter().map(|&z| semicircle_stieltjes(z)).collect::<Result<_>>()?;
    let per: Vec<Result<Vec<Vec<C64>>>> = exec.map(cfg.samples, |k| {
        let h = draw(&profile, &cfg.law, task_seed(cfg.seed, k));
        let spec = eigen_decompose(&h, true)?;
        zs.iter()
            .zip(&ms)
            .map(|(&z, &m)| Ok(spec.resolvent_diagonal(z)?.into_iter().map(|g| g - m).collect()))
            .collect()
    });
    let per: Vec<Vec<Vec<C64>>> = per.into_iter().collect::<Result<_>>()?;
    let mut report = ExperimentReport::new("flucavg", cfg.seed, cfg.samples);
    report.param("profile", cfg.profile.tag()).param("law", cfg.law.tag()).param("N", n).param("E", cfg.energy);
    let mut table = Table::new("per_eta", &["eta", "M_eta", "median_std_v_i", "std_mean_v", "ratio", "bound"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (e, &z) in zs.iter().enumerate() {
        let stds: Vec<f64> = (0..n).map(|i| complex_std(&per.iter().map(|s| s[e][i]).collect::<Vec<_>>())).collect();
        let avgs: Vec<C64> = per.iter().map(|s| s[e].iter().sum::<C64>() / n as f64).collect();
        let single = stats::median(&stds);
        let avg = complex_std(&avgs);
        let ratio = avg / single;
        let meta = profile.m() * z.im;
        let bound = cfg.ratio_factor / sqrt(meta);
        table.push(alloc::vec![z.im, meta, single, avg, ratio, bound]);
        xs.push(log(meta));
        ys.push(log(ratio));
        let name = alloc::format!("ratio_eta{}", e);
        if e == cfg.primary {
            report.check(&name, ratio, Bound::AtMost(bound));
        } else {
            report.observe(&name, ratio, Bound::AtMost(bound));
        }
    }
    if zs.len() >= 2 {
        let fit = stats::linear_fit(&xs, &ys)?;
        report.metric_se("slope_ratio_vs_Meta", fit.slope, fit.slope_se);
        report.check("slope_ratio_vs_Meta", fit.slope, Bound::Within { target: -0.5, tol: cfg.slope_tol });
    }
    report.table(table);
    Ok(report)
}
