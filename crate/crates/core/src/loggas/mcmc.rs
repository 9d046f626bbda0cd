use alloc::vec::Vec;
use libm::{exp, log};

use super::potential::{BetaSpec, Potential};
use crate::exec::{task_seed, Executor};
use crate::rng::{self, StreamRng};
use crate::{stats, Error, Result};

/// Target acceptance band for the adaptive proposal scale.
pub const TARGET_ACCEPTANCE: (f64, f64) = (0.30, 0.40);

/// Metropolis acceptance probability for a proposal with log weight ratio `log_ratio`.
#[inline]
pub fn metropolis_accept_prob(log_ratio: f64) -> f64 {
    if log_ratio >= 0.0 {
        1.0
    } else {
        exp(log_ratio)
    }
}

/// `Σ_j log(|new − p_j| / |old − p_j|)`, multiplying ratios in short runs.
fn log_ratio_sum(points: impl Iterator<Item = f64>, old: f64, new: f64) -> f64 {
    let mut acc = 0.0;
    let mut prod = 1.0;
    let mut run = 0;
    for p in points {
        prod *= (new - p) / (old - p);
        run += 1;
        if run == 32 {
            acc += log(prod.abs());
            prod = 1.0;
            run = 0;
        }
    }
    acc + log(prod.abs())
}

/// Log-gas with mobile particles in `(lo, hi)` and optional frozen particles:
/// weight `exp(−βN Σ V(x_i)/2) Π_{i<j}|x_i − x_j|^β Π_{i,k}|x_i − y_k|^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct GasTarget {
    pub beta: f64,
    /// `N` in the `βN` prefactor.
    pub scale_n: usize,
    pub potential: Potential,
    pub frozen: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl GasTarget {
    pub fn global(spec: &BetaSpec) -> Self {
        Self {
            beta: spec.beta,
            scale_n: spec.n,
            potential: spec.potential.clone(),
            frozen: Vec::new(),
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    /// Log weight of a configuration (up to the normalisation).
    pub fn log_weight(&self, x: &[f64]) -> f64 {
        let bn = self.beta * self.scale_n as f64;
        let mut w: f64 = -0.5 * bn * x.iter().map(|&v| self.potential.value(v)).sum::<f64>();
        for j in 0..x.len() {
            for i in 0..j {
                w += self.beta * log((x[j] - x[i]).abs());
            }
            for &y in &self.frozen {
                w += self.beta * log((x[j] - y).abs());
            }
        }
        w
    }

    /// Change of log weight when particle `i` moves to `new`.
    pub fn log_ratio(&self, x: &[f64], i: usize, new: f64) -> f64 {
        let old = x[i];
        let bn = self.beta * self.scale_n as f64;
        let dv = self.potential.value(new) - self.potential.value(old);
        let others = x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v);
        let inter = log_ratio_sum(others.chain(self.frozen.iter().copied()), old, new);
        -0.5 * bn * dv + self.beta * inter
    }

    /// Open interval allowed for particle `i` by the ordering.
    fn neighbours(&self, x: &[f64], i: usize) -> (f64, f64) {
        let left = if i == 0 { self.lo } else { x[i - 1] };
        let right = if i + 1 == x.len() { self.hi } else { x[i + 1] };
        (left, right)
    }
}

/// Coordinate-wise random-walk Metropolis chain.
///
/// The proposal width for particle `i` is `scale` times a spacing computed
/// from the other particles, which do not move during the update, so the
/// proposal is symmetric.
#[derive(Debug, Clone)]
pub struct MetropolisChain {
    target: GasTarget,
    state: Vec<f64>,
    scale: f64,
    rng: StreamRng,
    accepted: u64,
    proposed: u64,
}

impl MetropolisChain {
    pub fn new(target: GasTarget, init: Vec<f64>, seed: u64) -> Result<Self> {
        if init.is_empty() {
            return Err(Error::invalid("empty configuration"));
        }
        if !(target.lo < target.hi) {
            return Err(Error::EmptyInterval);
        }
        let ordered = init.windows(2).all(|w| w[0] < w[1]);
        if !ordered || init[0] <= target.lo || init[init.len() - 1] >= target.hi {
            return Err(Error::invalid("initial configuration must be ordered and inside the interval"));
        }
        Ok(Self { target, state: init, scale: 0.5, rng: rng::stream(seed, 0), accepted: 0, proposed: 0 })
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn target(&self) -> &GasTarget {
        &self.target
    }

    pub fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            f64::NAN
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn reset_counts(&mut self) {
        self.accepted = 0;
        self.proposed = 0;
    }

    /// Proposal width for particle `i`; depends only on the other particles.
    fn width(&self, i: usize) -> f64 {
        let x = &self.state;
        let n = x.len();
        let (l, r) = self.target.neighbours(x, i);
        if l.is_finite() && r.is_finite() {
            r - l
        } else if i == 0 && n >= 3 && r.is_finite() {
            x[2] - x[1]
        } else if i + 1 == n && n >= 3 && l.is_finite() {
            x[n - 2] - x[n - 3]
        } else {
            2.0 / libm::sqrt(self.target.beta * self.target.scale_n as f64)
        }
    }

    /// One update of every particle in turn.
    pub fn sweep(&mut self) {
        for i in 0..self.state.len() {
            self.proposed += 1;
            let new = self.state[i] + self.scale * self.width(i) * rng::normal(&mut self.rng);
            let (l, r) = self.target.neighbours(&self.state, i);
            if !(new > l && new < r) {
                continue;
            }
            let lr = self.target.log_ratio(&self.state, i, new);
            if rng::uniform(&mut self.rng) < metropolis_accept_prob(lr) {
                self.state[i] = new;
                self.accepted += 1;
            }
        }
    }

    /// Burn-in with Robbins–Monro adaptation of the scale towards the
    /// middle of the target band; the scale is frozen afterwards.
    pub fn burn_in(&mut self, sweeps: usize) {
        let target = 0.5 * (TARGET_ACCEPTANCE.0 + TARGET_ACCEPTANCE.1);
        let block = 25;
        let mut k = 0;
        while k < sweeps {
            self.reset_counts();
            let m = block.min(sweeps - k);
            for _ in 0..m {
                self.sweep();
            }
            k += m;
            let rate = 2.0 / libm::sqrt(1.0 + (k / block) as f64);
            self.scale = (self.scale * exp(rate * (self.acceptance() - target))).clamp(1e-4, 10.0);
        }
        self.reset_counts();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcConfig {
    /// Retained configurations.
    pub samples: usize,
    /// Adaptive burn-in sweeps (discarded).
    pub burn_in: usize,
    /// Sweeps between retained configurations.
    pub thinning: usize,
    pub seed: u64,
}

/// Output of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub samples: Vec<Vec<f64>>,
    /// Acceptance rate after burn-in.
    pub acceptance: f64,
    pub scale: f64,
}

impl Chain {
    /// Values of an observable along the chain.
    pub fn observable<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        self.samples.iter().map(|s| f(s)).collect()
    }

    /// Integrated autocorrelation time of an observable, in retained samples.
    pub fn autocorrelation<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        stats::autocorrelation_time(&self.observable(f))
    }
}

pub fn run_chain(target: GasTarget, init: Vec<f64>, cfg: &McmcConfig) -> Result<Chain> {
    if cfg.thinning == 0 {
        return Err(Error::invalid("thinning must be positive"));
    }
    let mut chain = MetropolisChain::new(target, init, cfg.seed)?;
    chain.burn_in(cfg.burn_in);
    let mut samples = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        for _ in 0..cfg.thinning {
            chain.sweep();
        }
        samples.push(chain.state.clone());
    }
    Ok(Chain { samples, acceptance: chain.acceptance(), scale: chain.scale })
}

/// Strictly ordered start at the `(j − ½)/N` quantiles of the equilibrium measure.
pub fn equilibrium_start(spec: &BetaSpec) -> Result<Vec<f64>> {
    use crate::spectral::DensityModel;
    let model = super::equilibrium::equilibrium_model(&spec.potential)?;
    Ok((1..=spec.n).map(|j| model.quantile((j as f64 - 0.5) / spec.n as f64)).collect())
}

/// Metropolis sampling of the global gas.
pub fn mcmc_sample(spec: &BetaSpec, cfg: &McmcConfig) -> Result<Chain> {
    run_chain(GasTarget::global(spec), equilibrium_start(spec)?, cfg)
}

/// Pooled independent chains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPool {
    pub chains: Vec<Chain>,
}

impl ChainPool {
    pub fn samples(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.chains.iter().flat_map(|c| c.samples.iter())
    }

    pub fn observable<F: Fn(&[f64]) -> f64 + Copy>(&self, f: F) -> Vec<f64> {
        self.chains.iter().flat_map(|c| c.observable(f)).collect()
    }

    /// `Σ_c n_c / τ_c` for an observable.
    pub fn effective_samples<F: Fn(&[f64]) -> f64 + Copy>(&self, f: F) -> f64 {
        self.chains.iter().map(|c| c.samples.len() as f64 / c.autocorrelation(f)).sum()
    }

    pub fn acceptance(&self) -> f64 {
        stats::mean(&self.chains.iter().map(|c| c.acceptance).collect::<Vec<_>>())
    }
}

/// `chains` independent chains with seeds derived from `cfg.seed`.
pub fn run_pool<E: Executor>(exec: &E, target: &GasTarget, init: &[f64], cfg: &McmcConfig, chains: usize) -> Result<ChainPool> {
    let out: Vec<Result<Chain>> = exec.map(chains, |k| {
        run_chain(target.clone(), init.to_vec(), &McmcConfig { seed: task_seed(cfg.seed, k), ..*cfg })
    });
    Ok(ChainPool { chains: out.into_iter().collect::<Result<_>>()? })
}
