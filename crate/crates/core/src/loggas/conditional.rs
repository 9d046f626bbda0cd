use alloc::vec::Vec;
use libm::{log, pow};

use super::mcmc::{run_chain, Chain, GasTarget, McmcConfig};
use super::potential::{BetaSpec, Potential};
use crate::spectral::DensityModel;
use crate::{Error, Result};

/// Boundary data `y` for the measure on the window `I = ⟦first, last⟧` (1-based)
/// conditioned on the other `N − 𝒦` particles.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSpec {
    n: usize,
    first: usize,
    last: usize,
    /// External particles in order, labels `1..first` then `last+1..=N`.
    y: Vec<f64>,
    potential: Potential,
}

impl ConditionalSpec {
    /// Window `⟦first, last⟧` of a full ordered configuration `lambda`.
    pub fn from_configuration(lambda: &[f64], first: usize, last: usize, potential: Potential) -> Result<Self> {
        let n = lambda.len();
        if first < 2 || last + 1 > n || first > last {
            return Err(Error::invalid("window must leave at least one particle on each side"));
        }
        if !lambda.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("boundary configuration must be strictly ordered"));
        }
        let y = lambda[..first - 1].iter().chain(&lambda[last..]).copied().collect();
        Ok(Self { n, first, last, y, potential })
    }

    /// Symmetric window `⟦L − K, L + K⟧`, `𝒦 = 2K + 1`.
    pub fn symmetric(lambda: &[f64], l: usize, k: usize, potential: Potential) -> Result<Self> {
        if l <= k {
            return Err(Error::invalid("window leaves the configuration"));
        }
        Self::from_configuration(lambda, l - k, l + k, potential)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> (usize, usize) {
        (self.first, self.last)
    }

    /// `𝒦`, the number of interior particles.
    pub fn kappa(&self) -> usize {
        self.last - self.first + 1
    }

    /// `K` in the `K^ξ` tolerances: `⌊𝒦/2⌋`.
    pub fn half_width(&self) -> usize {
        self.kappa() / 2
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn boundary(&self) -> &[f64] {
        &self.y
    }

    /// `(1-based label, position)` of each external particle.
    pub fn labelled_boundary(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let split = self.first - 1;
        self.y.iter().enumerate().map(move |(i, &v)| (if i < split { i + 1 } else { i + 1 + self.kappa() }, v))
    }

    /// Configuration interval `J = (y_{first−1}, y_{last+1})`.
    pub fn interval(&self) -> (f64, f64) {
        (self.y[self.first - 2], self.y[self.first - 1])
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.interval();
        b - a
    }

    /// `ȳ`, the midpoint of `J`.
    pub fn midpoint(&self) -> f64 {
        let (a, b) = self.interval();
        0.5 * (a + b)
    }

    /// Equidistant points `α_j = ȳ + (j − L)|J|/(𝒦 + 1)`, `L` the window centre.
    pub fn alpha(&self, j: usize) -> f64 {
        let centre = 0.5 * (self.first + self.last) as f64;
        self.midpoint() + (j as f64 - centre) / (self.kappa() + 1) as f64 * self.length()
    }

    pub fn alphas(&self) -> Vec<f64> {
        (self.first..=self.last).map(|j| self.alpha(j)).collect()
    }

    /// `d(x)`, distance to the nearer end of `J`.
    pub fn distance(&self, x: f64) -> f64 {
        let (a, b) = self.interval();
        (x - a).min(b - x)
    }

    /// `V_y(x) = V(x) − (2/N) Σ_k log|x − y_k|`.
    pub fn v_y(&self, x: f64) -> f64 {
        let s: f64 = self.y.iter().map(|&y| log((x - y).abs())).sum();
        self.potential.value(x) - 2.0 * s / self.n as f64
    }

    pub fn v_y_first(&self, x: f64) -> f64 {
        let s: f64 = self.y.iter().map(|&y| 1.0 / (x - y)).sum();
        self.potential.first(x) - 2.0 * s / self.n as f64
    }

    pub fn v_y_second(&self, x: f64) -> f64 {
        let s: f64 = self.y.iter().map(|&y| 1.0 / ((x - y) * (x - y))).sum();
        self.potential.second(x) + 2.0 * s / self.n as f64
    }

    /// `min_x [V_y″(x) − inf V″ − c/d(x)]` over `grid` interior points of `J`.
    pub fn convexity_margin(&self, c: f64, grid: usize) -> f64 {
        let (a, b) = self.interval();
        let inf = self.potential.inf_second();
        (0..grid)
            .map(|k| {
                let x = a + (b - a) * (k as f64 + 0.5) / grid as f64;
                self.v_y_second(x) - inf - c / self.distance(x)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `min_x (V_y″(x) − inf V″)·d(x)`: the largest `c` for which the margin is non-negative.
    pub fn convexity_constant(&self, grid: usize) -> f64 {
        let (a, b) = self.interval();
        let inf = self.potential.inf_second();
        (0..grid)
            .map(|k| {
                let x = a + (b - a) * (k as f64 + 0.5) / grid as f64;
                (self.v_y_second(x) - inf) * self.distance(x)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Metropolis target for the interior particles at inverse temperature `β`.
    pub fn target(&self, beta: f64) -> Result<GasTarget> {
        if !(beta > 0.0) {
            return Err(Error::invalid("β must be positive"));
        }
        let (lo, hi) = self.interval();
        if !(lo < hi) {
            return Err(Error::EmptyInterval);
        }
        Ok(GasTarget { beta, scale_n: self.n, potential: self.potential.clone(), frozen: self.y.clone(), lo, hi })
    }

    pub fn beta_spec(&self, beta: f64) -> Result<BetaSpec> {
        BetaSpec::new(self.n, beta, self.potential.clone())
    }
}

/// Metropolis chain for `μ_y` started at the equidistant points `α_j`.
pub fn conditional_sample(cond: &ConditionalSpec, beta: f64, cfg: &McmcConfig) -> Result<Chain> {
    run_chain(cond.target(beta)?, cond.alphas(), cfg)
}

/// Frozen constant `c` in the lower bound `V_y″ ≥ inf V″ + c/d(x)`: half the
/// smallest value of `min_x (V_y″ − inf V″) d(x)` over classical-location
/// boundary data with `N ∈ {100, 200, 400, 800}`, `𝒦 ∈ {5, 9, 17}`, quadratic `V`.
pub const CONVEXITY_CONSTANT: f64 = 0.39;

/// Good-set test for boundary data against classical locations of `model`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodSetReport {
    pub good: bool,
    /// Smallest `bound − |y_k − γ_k|` over all constraints.
    pub worst_margin: f64,
    pub worst_label: usize,
}

pub fn good_set_check<D: DensityModel>(cond: &ConditionalSpec, model: &D, xi: f64, alpha: f64) -> GoodSetReport {
    let n = cond.n();
    let nf = n as f64;
    let kx = pow(cond.half_width().max(1) as f64, xi);
    let bulk = (libm::ceil(alpha * nf) as usize, libm::floor((1.0 - alpha) * nf) as usize);
    let edge = libm::ceil(pow(nf, 0.6) * kx);
    let inner = (edge, nf - edge);
    let mut worst = GoodSetReport { good: true, worst_margin: f64::INFINITY, worst_label: 0 };
    for (k, y) in cond.labelled_boundary() {
        let dev = (y - model.classical_location(k, n)).abs();
        let mut bound: f64 = 1.0;
        if k >= bulk.0 && k <= bulk.1 {
            bound = bound.min(kx / nf);
        }
        if k as f64 >= inner.0 && k as f64 <= inner.1 {
            bound = bound.min(pow(nf, -4.0 / 15.0) * kx);
        }
        let margin = bound - dev;
        if margin < worst.worst_margin {
            worst.worst_margin = margin;
            worst.worst_label = k;
        }
    }
    worst.good = worst.worst_margin >= 0.0;
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SemicircleModel;

    pub(super) fn classical(n: usize) -> Vec<f64> {
        (1..=n).map(|k| SemicircleModel.quantile((k as f64 - 0.5) / n as f64)).collect()
    }

    #[test]
    fn geometry() {
        let lam = classical(100);
        let c = ConditionalSpec::symmetric(&lam, 50, 4, Potential::quadratic()).unwrap();
        assert_eq!(c.kappa(), 9);
        assert_eq!(c.window(), (46, 54));
        assert_eq!(c.boundary().len(), 91);
        assert_eq!(c.interval(), (lam[44], lam[54]));
        let a = c.alphas();
        assert_eq!(a.len(), 9);
        assert!((a[4] - c.midpoint()).abs() < 1e-15);
        let step = c.length() / 10.0;
        assert!(a.windows(2).all(|w| (w[1] - w[0] - step).abs() < 1e-14));
        let labels: Vec<usize> = c.labelled_boundary().map(|(k, _)| k).collect();
        assert_eq!(labels[44], 45);
        assert_eq!(labels[45], 55);
        assert!(ConditionalSpec::symmetric(&lam, 3, 4, Potential::quadratic()).is_err());
        assert!(ConditionalSpec::from_configuration(&lam, 1, 5, Potential::quadratic()).is_err());
    }

    #[test]
    fn potential_derivatives() {
        let lam = classical(60);
        let c = ConditionalSpec::symmetric(&lam, 30, 3, Potential::quartic(1.0, 1.0).unwrap()).unwrap();
        let x = c.midpoint() + 0.1 * c.length();
        let h = 1e-6;
        assert!(((c.v_y(x + h) - c.v_y(x - h)) / (2.0 * h) - c.v_y_first(x)).abs() < 1e-6);
        assert!(((c.v_y_first(x + h) - c.v_y_first(x - h)) / (2.0 * h) - c.v_y_second(x)).abs() < 1e-4);
    }

    #[test]
    fn symmetric_boundary_has_flat_midpoint() {
        // Symmetric classical data around 0: V_y′(ȳ) = 0.
        let lam = classical(201);
        let c = ConditionalSpec::symmetric(&lam, 101, 8, Potential::quadratic()).unwrap();
        assert!(c.midpoint().abs() < 1e-12);
        assert!(c.v_y_first(c.midpoint()).abs() < 1e-10);
    }

    #[test]
    fn good_set() {
        let n = 400;
        let lam: Vec<f64> = (1..=n).map(|k| SemicircleModel.classical_location(k, n)).collect();
        let mut lam = lam;
        lam[n - 1] -= 1e-9;
        let c = ConditionalSpec::symmetric(&lam, 200, 8, Potential::quadratic()).unwrap();
        let r = good_set_check(&c, &SemicircleModel, 0.5, 0.1);
        assert!(r.good && r.worst_margin > 0.0);
        let mut moved = lam.clone();
        moved[100] += 1.0;
        moved.sort_by(f64::total_cmp);
        let c = ConditionalSpec::symmetric(&moved, 200, 8, Potential::quadratic()).unwrap();
        let r = good_set_check(&c, &SemicircleModel, 0.5, 0.1);
        assert!(!r.good);
    }

    #[test]
    fn single_particle_matches_quadrature() {
        // 𝒦 = 1: density ∝ e^{−βN V_y(x)/2} on J.
        let lam = classical(40);
        let c = ConditionalSpec::symmetric(&lam, 15, 0, Potential::quadratic()).unwrap();
        let beta = 2.0;
        let cfg = McmcConfig { samples: 40_000, burn_in: 500, thinning: 3, seed: 5 };
        let xs: Vec<f64> = conditional_sample(&c, beta, &cfg).unwrap().observable(|x| x[0]);
        let (a, b) = c.interval();
        let n = c.n() as f64;
        let shift = c.v_y(c.midpoint());
        let w = |x: f64| libm::exp(-0.5 * beta * n * (c.v_y(x) - shift));
        let z = crate::quad::integrate(w, a, b, 1e-12);
        let bins = 20;
        let h = (b - a) / bins as f64;
        let mut l1 = 0.0;
        for k in 0..bins {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let emp = xs.iter().filter(|&&x| x >= lo && x < hi).count() as f64 / xs.len() as f64;
            l1 += (emp - crate::quad::integrate(w, lo, hi, 1e-12) / z).abs();
        }
        assert!(l1 < 0.03, "{l1}");
    }

    #[test]
    fn centre_particle_is_centred() {
        let lam = classical(201);
        let c = ConditionalSpec::symmetric(&lam, 101, 4, Potential::quadratic()).unwrap();
        let cfg = McmcConfig { samples: 20_000, burn_in: 1000, thinning: 2, seed: 6 };
        let chain = conditional_sample(&c, 1.0, &cfg).unwrap();
        let centre = chain.observable(|x| x[4]);
        let tau = chain.autocorrelation(|x| x[4]);
        let se = crate::stats::std_dev(&centre) * libm::sqrt(tau / centre.len() as f64);
        assert!((crate::stats::mean(&centre) - c.midpoint()).abs() < 4.0 * se);
    }

    #[test]
    fn frozen_convexity_constant_holds_on_calibration_data() {
        for n in [100usize, 200, 400, 800] {
            for kappa in [5usize, 9, 17] {
                let c = ConditionalSpec::symmetric(&classical(n), n / 2, kappa / 2, Potential::quadratic()).unwrap();
                assert!(c.convexity_margin(CONVEXITY_CONSTANT, 1000) >= 0.0);
                assert!(c.convexity_constant(1000) >= 2.0 * CONVEXITY_CONSTANT * 0.999);
            }
        }
    }
}

