use rmt_core::bandlab::{band_experiment, figure1_report, BandConfig, Figure1Config};
use rmt_core::dbm::{relaxation_experiment, sde_consistency_experiment, RelaxationConfig};
use rmt_core::ensemble::{EntryLaw, Family, ProfileSpec, Shape, SymmetryClass};
use rmt_core::gapstats::{
    compare_bulk_gaps, four_moment_config, pair_correlation_experiment, surmise_experiment, PairCorrelationConfig,
    SurmiseConfig,
};
use rmt_core::locallaw::{
    delocalization_experiment, fluctuation_averaging_experiment, identities_experiment, lsc_scaling_experiment,
    rigidity_experiment, semicircle_experiment, DelocConfig, EtaRule, FlucAvgConfig, IdentitiesConfig, LscConfig,
    RigidityConfig, SemicircleConfig,
};
use rmt_core::loggas::{
    cross_validation_experiment, level_repulsion_experiment, local_gap_experiment, local_rigidity_experiment,
    ChainSettings, LocalGapConfig, LocalRigidityConfig, RepulsionConfig, XvalConfig,
};
use rmt_core::report::ExperimentReport;

use crate::config::{ConfigError, ExperimentConfig, Params};
use crate::parallel::Parallel;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] rmt_core::Error),
}

impl RunError {
    /// Invalid input (exit code 2) as opposed to a failed computation.
    pub fn is_invalid(&self) -> bool {
        matches!(
            self,
            RunError::Config(_)
                | RunError::Core(
                    rmt_core::Error::InvalidArgument(_)
                        | rmt_core::Error::BandTooWide { .. }
                        | rmt_core::Error::InfeasibleMoments { .. }
                        | rmt_core::Error::NotCirculant
                        | rmt_core::Error::NotFlat
                )
        )
    }
}

type Runner = fn(&Parallel, &ExperimentConfig) -> Result<ExperimentReport, RunError>;

pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    /// The statement the experiment probes.
    pub topic: &'static str,
    run: Runner,
}

impl CatalogEntry {
    pub fn run(&self, exec: &Parallel, cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
        (self.run)(exec, cfg)
    }
}

pub fn parse_law(id: &str) -> Result<EntryLaw, ConfigError> {
    let bad = || ConfigError::Param { key: "law".into(), reason: format!("unknown law `{id}`") };
    match id {
        "goe" => return Ok(EntryLaw::goe()),
        "gue" => return Ok(EntryLaw::gue()),
        _ => {}
    }
    let (fam, class) = id.split_once('/').ok_or_else(bad)?;
    let class = match class {
        "real" => SymmetryClass::RealSymmetric,
        "complex" => SymmetryClass::ComplexHermitian,
        _ => return Err(bad()),
    };
    let fam = match fam {
        "gaussian" => Family::Gaussian,
        "bernoulli" => Family::Bernoulli,
        "uniform" => Family::Uniform,
        _ => return Err(bad()),
    };
    EntryLaw::new(fam, class).map_err(|e| ConfigError::Param { key: "law".into(), reason: e.to_string() })
}

fn shape(p: &Params) -> Result<Shape, ConfigError> {
    let id = p.str("shape", "uniform")?;
    Shape::from_id(&id).map_err(|e| ConfigError::Param { key: "shape".into(), reason: e.to_string() })
}

fn profile(p: &Params) -> Result<ProfileSpec, ConfigError> {
    match p.str("profile", "flat")?.as_str() {
        "flat" => Ok(ProfileSpec::Flat),
        "band" => Ok(ProfileSpec::Band { width: p.usize("width", 16)?, shape: shape(p)? }),
        "band-power" => Ok(ProfileSpec::BandPower { exponent: p.f64("width_exponent", 0.9)?, shape: shape(p)? }),
        other => Err(ConfigError::Param { key: "profile".into(), reason: format!("unknown profile `{other}`") }),
    }
}

fn chains(p: &Params, d: ChainSettings) -> Result<ChainSettings, ConfigError> {
    Ok(ChainSettings {
        chains: p.usize("chains", d.chains)?,
        burn_in: p.usize("burn_in", d.burn_in)?,
        thinning: p.usize("thinning", d.thinning)?,
    })
}

fn identities(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let d = IdentitiesConfig::default();
    let cfg = IdentitiesConfig {
        n: p.size(d.n),
        samples: p.samples(d.samples),
        grid: p.usize("grid", d.grid)?,
        seed: c.seed,
        m_tol: p.f64("m_tol", d.m_tol)?,
        resolvent_tol: p.f64("resolvent_tol", d.resolvent_tol)?,
    };
    p.finish()?;
    Ok(identities_experiment(exec, &cfg)?)
}

fn semicircle(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let d = SemicircleConfig::default();
    let cfg = SemicircleConfig {
        law: parse_law(&p.str("law", "goe")?)?,
        n: p.size(d.n),
        samples: p.samples(d.samples),
        bins: p.usize("bins", d.bins)?,
        lo: p.f64("lo", d.lo)?,
        hi: p.f64("hi", d.hi)?,
        seed: c.seed,
        l1_tol: p.f64("l1_tol", d.l1_tol)?,
    };
    p.finish()?;
    Ok(semicircle_experiment(exec, &cfg)?)
}

fn lsc(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let fixed = p.f64("eta", f64::NAN)?;
    let eta = if fixed.is_finite() { EtaRule::Fixed(fixed) } else { EtaRule::Power(p.f64("eta_exponent", -0.8)?) };
    let cfg = LscConfig {
        profile: profile(&p)?,
        law: parse_law(&p.str("law", "goe")?)?,
        sizes: p.sizes(&[250, 500, 1000, 2000]),
        energy: p.f64("energy", 0.0)?,
        eta,
        samples: p.samples(20),
        seed: c.seed,
        slope_tol: p.f64("slope_tol", 0.25)?,
    };
    p.finish()?;
    Ok(lsc_scaling_experiment(exec, &cfg)?)
}

fn rigidity(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let cfg = RigidityConfig {
        profile: profile(&p)?,
        law: parse_law(&p.str("law", "goe")?)?,
        sizes: p.sizes(&[1000]),
        samples: p.samples(20),
        seed: c.seed,
        log_factor: p.f64("log_factor", 10.0)?,
    };
    p.finish()?;
    Ok(rigidity_experiment(exec, &cfg)?)
}

fn deloc(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let cfg = DelocConfig {
        profile: profile(&p)?,
        law: parse_law(&p.str("law", "goe")?)?,
        sizes: p.sizes(&[500, 1000, 2000]),
        samples: p.samples(2),
        seed: c.seed,
        log_factor: p.f64("log_factor", 10.0)?,
    };
    p.finish()?;
    Ok(delocalization_experiment(exec, &cfg)?)
}

fn flucavg(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let exps = p.f64_list("eta_exponents", &[-0.5, -0.3, -0.4, -0.6])?;
    let cfg = FlucAvgConfig {
        profile: profile(&p)?,
        law: parse_law(&p.str("law", "goe")?)?,
        n: p.size(1000),
        energy: p.f64("energy", 0.0)?,
        etas: exps.into_iter().map(EtaRule::Power).collect(),
        primary: p.usize("primary", 0)?,
        samples: p.samples(100),
        seed: c.seed,
        ratio_factor: p.f64("ratio_factor", 3.0)?,
        slope_tol: p.f64("slope_tol", 0.2)?,
    };
    p.finish()?;
    Ok(fluctuation_averaging_experiment(exec, &cfg)?)
}

fn surmise(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let d = SurmiseConfig::default();
    let cfg = SurmiseConfig {
        pairs: p.usize("pairs", d.pairs)?,
        n: p.size(d.n),
        samples: p.samples(d.samples),
        seed: c.seed,
        exact_tol: p.f64("exact_tol", d.exact_tol)?,
        approx_tol: p.f64("approx_tol", d.approx_tol)?,
    };
    p.finish()?;
    Ok(surmise_experiment(exec, &cfg)?)
}

fn pair_correlation(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let d = PairCorrelationConfig::default();
    let cfg = PairCorrelationConfig {
        n: p.size(d.n),
        samples: p.samples(d.samples),
        seed: c.seed,
        r_max: p.f64("r_max", d.r_max)?,
        width: p.f64("width", d.width)?,
        l1_tol: p.f64("l1_tol", d.l1_tol)?,
        poisson_points: p.usize("poisson_points", d.poisson_points)?,
        flat_tol: p.f64("flat_tol", d.flat_tol)?,
    };
    p.finish()?;
    Ok(pair_correlation_experiment(exec, &cfg)?)
}

fn relaxation_config(p: &Params, c: &ExperimentConfig) -> Result<RelaxationConfig, ConfigError> {
    let law = parse_law(&p.str("law", "bernoulli/real")?)?;
    let mut cfg = RelaxationConfig::standard(law, p.size(500), c.seed);
    cfg.samples = p.samples(cfg.samples);
    cfg.reference_samples = p.usize("reference_samples", cfg.reference_samples)?;
    cfg.ks_threshold = p.f64("ks_threshold", cfg.ks_threshold)?;
    cfg.invariance = p.bool("invariance", cfg.invariance)?;
    Ok(cfg)
}

fn sde_settings(p: &Params) -> Result<(SymmetryClass, f64, usize, f64), ConfigError> {
    let class = match p.str("sde_class", "real")?.as_str() {
        "real" => SymmetryClass::RealSymmetric,
        "complex" => SymmetryClass::ComplexHermitian,
        other => return Err(ConfigError::Param { key: "sde_class".into(), reason: format!("unknown class `{other}`") }),
    };
    Ok((class, p.f64("sde_t", 1.0)?, p.usize("sde_samples", 10_000)?, p.f64("sde_ks_threshold", 0.05)?))
}

fn dbm(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let cfg = relaxation_config(&p, c)?;
    let (class, t, samples, ks) = sde_settings(&p)?;
    p.finish()?;
    let mut report = relaxation_experiment(exec, &cfg)?;
    let sde = sde_consistency_experiment(exec, class, t, samples, rmt_core::rng::derive(c.seed, 2), ks)?;
    report.absorb("sde", sde);
    Ok(report)
}

fn dbm_sde(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let (class, t, samples, ks) = sde_settings(&p)?;
    let samples = c.samples.unwrap_or(samples);
    p.finish()?;
    Ok(sde_consistency_experiment(exec, class, t, samples, c.seed, ks)?)
}

fn four_moment(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let mut cfg = four_moment_config(p.size(500), p.samples(50), c.seed)?;
    cfg.ks_threshold = p.f64("ks_threshold", cfg.ks_threshold)?;
    p.finish()?;
    Ok(compare_bulk_gaps(exec, &cfg)?)
}

fn xval(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let d = XvalConfig::default();
    let cfg = XvalConfig {
        n: p.size(d.n),
        beta: p.f64("beta", d.beta)?,
        samples: p.samples(d.samples),
        chains: chains(&p, d.chains)?,
        seed: c.seed,
        ks_tol: p.f64("ks_tol", d.ks_tol)?,
        n1_tol: p.f64("n1_tol", d.n1_tol)?,
        n2_tol: p.f64("n2_tol", d.n2_tol)?,
    };
    p.finish()?;
    Ok(cross_validation_experiment(exec, &cfg)?)
}

fn repulsion(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let betas = p.f64_list("betas", &[1.0, 2.0])?;
    let mut cfgs = Vec::new();
    for (a, &beta) in betas.iter().enumerate() {
        let d = RepulsionConfig::new(beta, rmt_core::rng::derive(c.seed, a as u64));
        cfgs.push(RepulsionConfig {
            n: p.size(d.n),
            kappa: p.usize("kappa", d.kappa)?,
            samples: p.samples(d.samples),
            chains: chains(&p, d.chains)?,
            s_min: p.f64("s_min", d.s_min)?,
            s_max: p.f64("s_max", d.s_max)?,
            grid: p.usize("grid", d.grid)?,
            min_events: p.usize("min_events", d.min_events)?,
            slope_tol: p.f64("slope_tol", d.slope_tol)?,
            ..d
        });
    }
    p.finish()?;
    let mut report = ExperimentReport::new("repulsion", c.seed, 0);
    for cfg in &cfgs {
        report.param(&format!("beta{}", cfg.beta), format!("N={} kappa={}", cfg.n, cfg.kappa));
        report.absorb(&format!("beta{}", cfg.beta), level_repulsion_experiment(exec, cfg)?);
    }
    Ok(report)
}

fn local_rigidity(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let d = LocalRigidityConfig::default();
    let cfg = LocalRigidityConfig {
        n: p.size(d.n),
        k: p.usize("k", d.k)?,
        beta: p.f64("beta", d.beta)?,
        samples: p.samples(d.samples),
        chains: chains(&p, d.chains)?,
        seed: c.seed,
    };
    p.finish()?;
    Ok(local_rigidity_experiment(exec, &cfg)?)
}

fn gap_local(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let d = LocalGapConfig::default();
    let cfg = LocalGapConfig {
        n: p.size(d.n),
        k: p.usize("k", d.k)?,
        beta: p.f64("beta", d.beta)?,
        xi: p.f64("xi", d.xi)?,
        alpha: p.f64("alpha", d.alpha)?,
        samples: p.samples(d.samples),
        chains: chains(&p, d.chains)?,
        draws: p.usize("draws", d.draws)?,
        seed: c.seed,
        ks_tol: p.f64("ks_tol", d.ks_tol)?,
    };
    p.finish()?;
    Ok(local_gap_experiment(exec, &cfg)?)
}

fn figure_config(p: &Params) -> Result<Figure1Config, ConfigError> {
    let d = Figure1Config::default();
    let ks = p.f64_list("figure_ks", &d.ks.iter().map(|&k| k as f64).collect::<Vec<_>>())?;
    Ok(Figure1Config {
        w: p.usize("width", d.w)?,
        ratio: p.usize("ratio", d.ratio)?,
        ks: ks.into_iter().map(|k| k as u32).collect(),
        energy: p.f64("energy", d.energy)?,
        shape: shape(p)?,
        height_factor: p.f64("height_factor", d.height_factor)?,
    })
}

fn band(exec: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let d = BandConfig::standard(c.seed);
    let small = p.usize("flat_small_n", d.flat_small_n.unwrap_or(0))?;
    let cfg = BandConfig {
        w: p.usize("width", d.w)?,
        n: p.size(d.n),
        energy: p.f64("energy", d.energy)?,
        shape: shape(&p)?,
        law: parse_law(&p.str("law", "gue")?)?,
        etas: p.f64_list("etas", &d.etas)?,
        samples: p.samples(d.samples),
        seed: c.seed,
        l1_constant: p.f64("l1_constant", d.l1_constant)?,
        mass_tol: p.f64("mass_tol", d.mass_tol)?,
        flat_eta: p.f64("flat_eta", d.flat_eta)?,
        flat_tol: p.f64("flat_tol", d.flat_tol)?,
        flat_small_n: (small > 0).then_some(small),
        figure: figure_config(&p)?,
    };
    p.finish()?;
    Ok(band_experiment(exec, &cfg)?)
}

fn band_figure(_: &Parallel, c: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let p = c.params();
    let cfg = figure_config(&p)?;
    p.finish()?;
    Ok(figure1_report(&cfg)?)
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry { id: "identities", description: "semicircle self-consistency and exact resolvent identities", topic: "resolvent identities, Ward identity, Schur complement", run: identities },
    CatalogEntry { id: "semicircle", description: "pooled eigenvalue histogram against the semicircle density", topic: "Wigner semicircle law", run: semicircle },
    CatalogEntry { id: "lsc", description: "scaling of |m_N - m| and max |G_ij - δ_ij m| with Nη", topic: "local semicircle law", run: lsc },
    CatalogEntry { id: "rigidity", description: "eigenvalue and counting-function deviations from classical locations", topic: "rigidity of eigenvalues", run: rigidity },
    CatalogEntry { id: "deloc", description: "sup-norms of eigenvectors, with a diagonal control", topic: "complete delocalization", run: deloc },
    CatalogEntry { id: "flucavg", description: "averaged vs individual fluctuations of G_ii - m", topic: "fluctuation averaging", run: flucavg },
    CatalogEntry { id: "surmise", description: "2x2 and bulk GOE gaps against the Wigner surmise", topic: "Wigner surmise", run: surmise },
    CatalogEntry { id: "pair-correlation", description: "GUE two-point function against the sine kernel, Poisson control", topic: "sine-kernel universality", run: pair_correlation },
    CatalogEntry { id: "dbm", description: "Bernoulli start relaxed by the Ornstein-Uhlenbeck flow, plus N = 2 SDE check", topic: "Dyson Brownian motion relaxation", run: dbm },
    CatalogEntry { id: "dbm-sde", description: "N = 2 eigenvalue SDE against the matrix flow", topic: "Dyson Brownian motion", run: dbm_sde },
    CatalogEntry { id: "four-moment", description: "three-point entry law vs Gaussian bulk gaps", topic: "four moment matching", run: four_moment },
    CatalogEntry { id: "loggas-xval", description: "tridiagonal vs Metropolis beta-ensemble samplers", topic: "beta-ensembles", run: xval },
    CatalogEntry { id: "repulsion", description: "small-gap CDF slope of the locally conditioned gas", topic: "level repulsion", run: repulsion },
    CatalogEntry { id: "local-rigidity", description: "interior fluctuations of the conditioned gas around alpha_j", topic: "local rigidity of the conditioned measure", run: local_rigidity },
    CatalogEntry { id: "gap-local", description: "central gaps for two good boundary conditions on a matched interval", topic: "local gap universality", run: gap_local },
    CatalogEntry { id: "band", description: "band-matrix T_xy against the diffusion profile, mass and flatness", topic: "diffusion profile of band matrices", run: band },
    CatalogEntry { id: "band-figure", description: "diffusion profile curves for eta = 5^-k", topic: "diffusive spreading of the profile", run: band_figure },
];

pub fn catalog() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn find(id: &str) -> Result<&'static CatalogEntry, ConfigError> {
    ENTRIES.iter().find(|e| e.id == id).ok_or_else(|| ConfigError::UnknownExperiment {
        id: id.into(),
        valid: ENTRIES.iter().map(|e| e.id).collect::<Vec<_>>().join(", "),
    })
}

pub fn run_experiment(exec: &Parallel, cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    find(&cfg.experiment)?.run(exec, cfg)
}
