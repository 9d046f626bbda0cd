use alloc::vec::Vec;
use libm::sqrt;

use crate::{rng, Error, Result};

/// Time-stepping scheme. Only Euler–Maruyama is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    EulerMaruyama,
}

/// Largest number of consecutive step halvings before a collision is reported.
pub const MAX_HALVINGS: u32 = 10;

/// `min(10⁻³, t/10³)`.
pub fn default_dt(t: f64) -> f64 {
    (1e-3f64).min(t / 1e3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub beta: f64,
    pub t: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub seed: u64,
    /// Disable the Brownian term (deterministic drift flow).
    pub noise: bool,
}

impl FlowConfig {
    pub fn new(beta: f64, t: f64, seed: u64) -> Result<Self> {
        Self::with_dt(beta, t, if t > 0.0 { default_dt(t) } else { 1e-3 }, seed)
    }

    pub fn with_dt(beta: f64, t: f64, dt: f64, seed: u64) -> Result<Self> {
        if !(beta > 0.0) || !(t >= 0.0) || !(dt > 0.0) || (t > 0.0 && dt > t) {
            return Err(Error::invalid("need β > 0, t ≥ 0 and 0 < dt ≤ t"));
        }
        Ok(Self { beta, t, dt, scheme: Scheme::EulerMaruyama, seed, noise: true })
    }

    pub fn without_noise(mut self) -> Self {
        self.noise = false;
        self
    }
}

/// Strictly ordered particle positions at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub time: f64,
    positions: Vec<f64>,
}

impl ParticleState {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("no particles"));
        }
        if let Some(i) = positions.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::invalid(alloc::format!("positions not strictly increasing at {i}")));
        }
        Ok(Self { time: 0.0, positions })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn is_ordered(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] < w[1])
    }
}

/// Drift `−(β/4) x_i + (β/2N) Σ_{j≠i} 1/(x_i − x_j)`.
pub fn drift(x: &[f64], beta: f64, out: &mut [f64]) {
    let n = x.len();
    let c = beta / (2.0 * n as f64);
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if j != i {
                s += 1.0 / (x[i] - x[j]);
            }
        }
        out[i] = -0.25 * beta * x[i] + c * s;
    }
}

/// Largest step for which the drift alone closes no gap by more than half.
fn drift_cap(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .filter(|(_, v)| v[0] > v[1])
        .map(|(w, v)| 0.5 * (w[1] - w[0]) / (v[0] - v[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Euler–Maruyama integration of
/// `dx_i = N^{−1/2} dB_i + [−(β/4) x_i + (β/2N) Σ_{j≠i} 1/(x_i − x_j)] dt`.
///
/// Steps are capped so the drift cannot close more than half of a gap. A step
/// that still breaks the ordering is retried with half the step size and fresh
/// noise, at most `MAX_HALVINGS` times.
pub fn dbm_integrate(x0: &ParticleState, cfg: &FlowConfig) -> Result<ParticleState> {
    let n = x0.positions.len();
    let noise_scale = 1.0 / sqrt(n as f64);
    let mut r = rng::stream(cfg.seed, 0);
    let mut x = x0.positions.clone();
    let mut f = alloc::vec![0.0; n];
    let mut trial = alloc::vec![0.0; n];
    let start = x0.time;
    let end = start + cfg.t;
    let mut t = start;
    while t < end - 1e-12 * cfg.dt {
        drift(&x, cfg.beta, &mut f);
        let mut h = cfg.dt.min(end - t).min(drift_cap(&x, &f));
        let mut halvings = 0;
        loop {
            let sd = noise_scale * sqrt(h);
            for i in 0..n {
                let dw = if cfg.noise { sd * rng::normal(&mut r) } else { 0.0 };
                trial[i] = x[i] + f[i] * h + dw;
            }
            match trial.windows(2).position(|w| !(w[0] < w[1])) {
                None => break,
                Some(i) => {
                    halvings += 1;
                    if halvings > MAX_HALVINGS {
                        return Err(Error::StepFloor { i, j: i + 1, time: t });
                    }
                    h *= 0.5;
                }
            }
        }
        core::mem::swap(&mut x, &mut trial);
        t += h;
    }
    Ok(ParticleState { time: end, positions: x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    #[test]
    fn config_validation() {
        assert!(FlowConfig::new(1.0, 1.0, 0).is_ok());
        assert_eq!(FlowConfig::new(1.0, 1.0, 0).unwrap().dt, 1e-3);
        assert_eq!(FlowConfig::new(1.0, 0.5, 0).unwrap().dt, 5e-4);
        assert!(FlowConfig::with_dt(1.0, 0.1, 0.2, 0).is_err());
        assert!(FlowConfig::with_dt(0.0, 1.0, 0.1, 0).is_err());
        assert!(ParticleState::new(alloc::vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn single_particle_is_ornstein_uhlenbeck() {
        // N = 1: dx = dB − (β/4) x dt, stationary variance 2/β.
        for beta in [1.0, 2.0] {
            let cfg = FlowConfig::with_dt(beta, 50.0, 0.01, 0).unwrap();
            let xs: Vec<f64> = (0..4000u64)
                .map(|s| {
                    let c = FlowConfig { seed: s, ..cfg };
                    dbm_integrate(&ParticleState::new(alloc::vec![0.0]).unwrap(), &c).unwrap().positions()[0]
                })
                .collect();
            assert!((stats::variance(&xs) / (2.0 / beta) - 1.0).abs() < 0.08, "β={beta}");
        }
    }

    #[test]
    fn drift_only_pair_reaches_fixed_point() {
        // Gap s obeys ds/dt = −(β/4)s + β/(N s); for N = 2 the fixed point is s = √2.
        let beta = 1.0;
        let x0 = ParticleState::new(alloc::vec![-0.1, 0.1]).unwrap();
        let cfg = FlowConfig::with_dt(beta, 60.0, 1e-3, 0).unwrap().without_noise();
        let x = dbm_integrate(&x0, &cfg).unwrap();
        let gap = x.positions()[1] - x.positions()[0];
        assert!((gap - sqrt(2.0)).abs() < 1e-6, "{gap}");
        assert!((x.positions()[0] + x.positions()[1]).abs() < 1e-12);
        let mut f = [0.0; 2];
        drift(&[-0.1, 0.1], beta, &mut f);
        assert!(f[0] < 0.0 && f[1] > 0.0);
    }

    #[test]
    fn ordering_survives_crowded_start() {
        let x0 = ParticleState::new((0..20).map(|i| i as f64 * 1e-3).collect()).unwrap();
        let cfg = FlowConfig::new(2.0, 0.5, 11).unwrap();
        let x = dbm_integrate(&x0, &cfg).unwrap();
        assert!(x.is_ordered());
        assert!((x.time - 0.5).abs() < 1e-15);
    }
}
