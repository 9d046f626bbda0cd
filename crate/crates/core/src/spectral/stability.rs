use alloc::vec::Vec;
use core::f64::consts::PI;
use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use libm::{ceil, cos, log, pow, sqrt};

use super::resolvent::ResolventData;
use super::semicircle::stieltjes_unchecked;
use crate::ensemble::VarianceProfile;
use crate::{Error, Result, C64};

/// Stability constants of the self-consistent equation at one `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gammas {
    /// `‖(1 − m²S)^{-1}‖_{∞→∞}`.
    pub gamma: f64,
    /// The same norm restricted to the complement of the constant vector.
    pub gamma_tilde: f64,
}

/// Lower thresholds for `η` found by a geometric grid scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaThresholds {
    /// Threshold defined with `Γ̃`.
    pub eta_tilde: f64,
    /// Threshold defined with `Γ`.
    pub eta: f64,
    pub grid_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct StabilityParams {
    pub z: C64,
    pub m: C64,
    pub m_n: C64,
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub thresholds: Option<EtaThresholds>,
    pub lambda_o: f64,
    pub lambda_d: f64,
    pub lambda: f64,
    pub theta_dev: f64,
    pub pi: f64,
    /// `v_i = G_ii − m`.
    pub v: Vec<C64>,
    pub v_mean: C64,
}

/// `Π = √(Im m / (Mη)) + 1/(Mη)`.
pub fn pi_parameter(im_m: f64, m_eta: f64) -> f64 {
    sqrt(im_m / m_eta) + 1.0 / m_eta
}

/// Cost of the best constant shift: `min_μ Σ_j |r_j − μ|` (geometric median).
///
/// This is the `∞→∞` norm of the row functional on vectors orthogonal to the
/// constant vector. The returned value is attained by some `μ`, so it never
/// undershoots the minimum and never exceeds the unshifted row sum.
pub fn restricted_row_norm(row: &[C64]) -> f64 {
    let cost = |mu: C64| row.iter().map(|r| (r - mu).norm()).sum::<f64>();
    let mut best = cost(C64::new(0.0, 0.0));
    let mut mu = row.iter().sum::<C64>() / row.len() as f64;
    for _ in 0..500 {
        let (mut num, mut den) = (C64::new(0.0, 0.0), 0.0);
        for r in row {
            let d = (r - mu).norm();
            if d > 1e-300 {
                num += r / d;
                den += 1.0 / d;
            }
        }
        if den == 0.0 {
            break;
        }
        let next = num / den;
        let step = (next - mu).norm();
        mu = next;
        if step <= 1e-15 * (1.0 + mu.norm()) {
            break;
        }
    }
    best = best.min(cost(mu));
    // The minimiser is frequently a data point (flat rows); Weiszfeld only
    // approaches it, so test the nearest one exactly.
    if let Some(near) = row.iter().min_by(|a, b| (*a - mu).norm().total_cmp(&(*b - mu).norm())) {
        best = best.min(cost(*near));
    }
    best
}

enum Backend {
    Flat { n: usize },
    Circulant { s_hat: Vec<f64>, cos_table: Vec<f64> },
    Dense { s: Mat<f64> },
}

/// Evaluates `Γ` and `Γ̃` for a fixed profile at many spectral parameters.
pub struct GammaEvaluator {
    backend: Backend,
}

impl GammaEvaluator {
    pub fn new(profile: &VarianceProfile) -> Self {
        let n = profile.dim();
        let backend = if profile.is_flat() {
            Backend::Flat { n }
        } else if profile.is_circulant() {
            let cos_table: Vec<f64> = (0..n).map(|k| cos(2.0 * PI * k as f64 / n as f64)).collect();
            let row = profile.row(0);
            let s_hat = (0..n).map(|p| (0..n).map(|k| row[k] * cos_table[(p * k) % n]).sum()).collect();
            Backend::Circulant { s_hat, cos_table }
        } else {
            Backend::Dense { s: Mat::from_fn(n, n, |i, j| profile.get(i, j)) }
        };
        Self { backend }
    }

    /// `Γ` and `Γ̃` for the given value of `m`.
    pub fn at_m(&self, m: C64) -> Result<Gammas> {
        let m2 = m * m;
        let singular = || Error::Singular("1 − m²S".into());
        match &self.backend {
            Backend::Flat { n } => {
                let nf = *n as f64;
                let d = C64::new(1.0, 0.0) - m2;
                if d.norm() < 1e-14 {
                    return Err(singular());
                }
                // (1 − m²S)^{-1} = I + c·ee*, c = m²/(N(1 − m²)).
                let c = m2 / (d * nf);
                let gamma = (c + 1.0).norm() + (nf - 1.0) * c.norm();
                Ok(Gammas { gamma, gamma_tilde: 1.0f64.min(gamma) })
            }
            Backend::Circulant { s_hat, cos_table } => {
                let n = s_hat.len();
                let mut inv_hat = Vec::with_capacity(n);
                for &s in s_hat {
                    let d = C64::new(1.0, 0.0) - m2 * s;
                    if d.norm() < 1e-14 {
                        return Err(singular());
                    }
                    inv_hat.push(d.inv());
                }
                let row: Vec<C64> =
                    (0..n).map(|k| (0..n).map(|p| inv_hat[p] * cos_table[(p * k) % n]).sum::<C64>() / n as f64).collect();
                let gamma = row.iter().map(|b| b.norm()).sum();
                Ok(Gammas { gamma, gamma_tilde: restricted_row_norm(&row) })
            }
            Backend::Dense { s } => {
                let n = s.nrows();
                let a = Mat::<C64>::from_fn(n, n, |i, j| {
                    let v = -m2 * s[(i, j)];
                    if i == j {
                        v + 1.0
                    } else {
                        v
                    }
                });
                let b = a.partial_piv_lu().inverse();
                let mut gamma = 0.0f64;
                let mut gamma_tilde = 0.0f64;
                let mut row = alloc::vec![C64::new(0.0, 0.0); n];
                for i in 0..n {
                    for j in 0..n {
                        row[j] = b[(i, j)];
                    }
                    let sum: f64 = row.iter().map(|x| x.norm()).sum();
                    if !sum.is_finite() {
                        return Err(singular());
                    }
                    gamma = gamma.max(sum);
                    gamma_tilde = gamma_tilde.max(restricted_row_norm(&row));
                }
                Ok(Gammas { gamma, gamma_tilde })
            }
        }
    }

    pub fn at(&self, z: C64) -> Result<Gammas> {
        if !(z.im > 0.0) {
            return Err(Error::NonPositiveImaginary(z.im));
        }
        self.at_m(stieltjes_unchecked(z))
    }
}

pub fn stability_gamma(profile: &VarianceProfile, z: C64) -> Result<Gammas> {
    GammaEvaluator::new(profile).at(z)
}

pub const ETA_GRID_MIN: f64 = 1e-6;
pub const ETA_GRID_MAX: f64 = 10.0;
pub const ETA_GRID_RATIO: f64 = 1.05;

/// `η̃_E` and `η_E` on the default grid.
pub fn eta_thresholds(profile: &VarianceProfile, e: f64, gamma_exp: f64) -> Result<EtaThresholds> {
    eta_thresholds_on_grid(profile, e, gamma_exp, ETA_GRID_RATIO)
}

/// Smallest grid `η` such that `1/(Mη') ≤ min(M^{-γ}/Γ³, M^{-2γ}/(Γ⁴ Im m))` for
/// every grid point `η' ∈ [η, 10]`; `Γ` is `Γ̃` for the first threshold.
pub fn eta_thresholds_on_grid(profile: &VarianceProfile, e: f64, gamma_exp: f64, ratio: f64) -> Result<EtaThresholds> {
    if !(e.abs() <= 10.0) {
        return Err(Error::invalid("energy must satisfy |E| ≤ 10"));
    }
    if !(gamma_exp > 0.0 && gamma_exp <= 0.1) {
        return Err(Error::invalid("exponent γ must lie in (0, 0.1]"));
    }
    if !(ratio > 1.0) {
        return Err(Error::invalid("grid ratio must exceed 1"));
    }
    let eval = GammaEvaluator::new(profile);
    let big_m = profile.m();
    let steps = ceil(log(ETA_GRID_MAX / ETA_GRID_MIN) / log(ratio)) as i32;
    let holds = |eta: f64, g: f64, im_m: f64| {
        let lhs = 1.0 / (big_m * eta);
        let rhs = (pow(big_m, -gamma_exp) / (g * g * g)).min(pow(big_m, -2.0 * gamma_exp) / (g * g * g * g * im_m));
        lhs <= rhs
    };
    let (mut tilde, mut plain) = (ETA_GRID_MAX, ETA_GRID_MAX);
    let (mut tilde_open, mut plain_open) = (true, true);
    for k in (0..=steps).rev() {
        let eta = (ETA_GRID_MIN * pow(ratio, k as f64)).min(ETA_GRID_MAX);
        let z = C64::new(e, eta);
        let m = stieltjes_unchecked(z);
        let g = eval.at_m(m)?;
        tilde_open &= holds(eta, g.gamma_tilde, m.im);
        plain_open &= holds(eta, g.gamma, m.im);
        if tilde_open {
            tilde = eta;
        }
        if plain_open {
            plain = eta;
        }
        if !tilde_open && !plain_open {
            break;
        }
    }
    Ok(EtaThresholds { eta_tilde: tilde, eta: plain, grid_ratio: ratio })
}

/// Deviation statistics of a full resolvent from the semicircle.
pub fn control_params(r: &ResolventData, profile: &VarianceProfile) -> Result<StabilityParams> {
    let g = r.full().ok_or_else(|| Error::invalid("control parameters need a full resolvent"))?;
    let n = g.nrows();
    if n != profile.dim() {
        return Err(Error::invalid("profile and resolvent dimensions differ"));
    }
    let z = r.z();
    let m = stieltjes_unchecked(z);
    let mut lambda_o = 0.0f64;
    let mut lambda_d = 0.0f64;
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                lambda_o = lambda_o.max(g[(i, j)].norm());
            }
        }
        let vi = g[(i, i)] - m;
        lambda_d = lambda_d.max(vi.norm());
        v.push(vi);
    }
    let v_mean = v.iter().sum::<C64>() / n as f64;
    let gam = GammaEvaluator::new(profile).at_m(m)?;
    Ok(StabilityParams {
        z,
        m,
        m_n: r.m_n(),
        gamma: gam.gamma,
        gamma_tilde: gam.gamma_tilde,
        thresholds: None,
        lambda_o,
        lambda_d,
        lambda: lambda_o.max(lambda_d),
        theta_dev: (r.m_n() - m).norm(),
        pi: pi_parameter(m.im, profile.m() * z.im),
        v,
        v_mean,
    })
}
