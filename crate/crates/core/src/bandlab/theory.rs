use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{cos, sqrt};

use crate::ensemble::{Shape, VarianceProfile};
use crate::spectral::semicircle_stieltjes;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMethod {
    Exact,
    FourierApprox,
    Empirical,
}

impl ProfileMethod {
    pub fn id(&self) -> &'static str {
        match self {
            ProfileMethod::Exact => "exact",
            ProfileMethod::FourierApprox => "fourier-approx",
            ProfileMethod::Empirical => "empirical",
        }
    }
}

/// A translation-invariant profile `θ_x`, indexed by the torus offset `x = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionProfile {
    pub z: C64,
    pub theta: Vec<f64>,
    /// Fourier multipliers `ŝ(p)` at `p = 2πk/N` (empty for empirical profiles).
    pub s_hat: Vec<f64>,
    /// Multipliers `θ̂(p)` of the profile itself.
    pub theta_hat: Vec<f64>,
    /// Contribution `θ̂(0)/N` of the constant mode to every `θ_x`.
    pub constant_mode: f64,
    pub mass: f64,
    /// Monte Carlo standard error per offset (empirical profiles only).
    pub stderr: Vec<f64>,
    pub method: ProfileMethod,
}

impl DiffusionProfile {
    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Signed offset of index `x`, in `(−N/2, N/2]`.
    pub fn offset(&self, x: usize) -> i64 {
        let n = self.dim() as i64;
        let x = x as i64;
        if x > n / 2 {
            x - n
        } else {
            x
        }
    }

    /// `(offset, θ)` pairs in increasing offset order.
    pub fn centred(&self) -> Vec<(i64, f64)> {
        let mut v: Vec<(i64, f64)> = (0..self.dim()).map(|x| (self.offset(x), self.theta[x])).collect();
        v.sort_by_key(|p| p.0);
        v
    }

    /// Profile with the constant mode removed.
    pub fn without_constant_mode(&self) -> Vec<f64> {
        self.theta.iter().map(|t| t - self.constant_mode).collect()
    }

    pub fn peak(&self) -> f64 {
        self.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn flatness(&self) -> f64 {
        self.peak() * self.dim() as f64 / self.mass
    }

    /// `Σ_x |θ_x − φ_x| / Σ_x |φ_x|`.
    pub fn relative_l1(&self, reference: &DiffusionProfile) -> Result<f64> {
        if reference.dim() != self.dim() {
            return Err(Error::invalid("profiles have different dimensions"));
        }
        let num: f64 = self.theta.iter().zip(&reference.theta).map(|(a, b)| (a - b).abs()).sum();
        let den: f64 = reference.theta.iter().map(|b| b.abs()).sum();
        Ok(num / den)
    }
}

/// `α = 2/√(4 − E²)`, the inverse of `Im m` on the real axis.
pub fn alpha(e: f64) -> Result<f64> {
    if !(e.abs() < 2.0) {
        return Err(Error::invalid("energy must lie inside the bulk (|E| < 2)"));
    }
    Ok(2.0 / sqrt(4.0 - e * e))
}

fn cos_table(n: usize) -> Vec<f64> {
    (0..n).map(|k| cos(2.0 * PI * k as f64 / n as f64)).collect()
}

/// Forward cosine transform of an even sequence on the torus.
fn even_dft(row: &[f64], table: &[f64]) -> Vec<f64> {
    let n = row.len();
    (0..n).map(|k| (0..n).map(|x| row[x] * table[(k * x) % n]).sum()).collect()
}

fn even_idft(hat: &[f64], table: &[f64]) -> Vec<f64> {
    let n = hat.len();
    (0..n).map(|x| (0..n).map(|k| hat[k] * table[(k * x) % n]).sum::<f64>() / n as f64).collect()
}

/// Solve `Θ = |m|²S(1 − |m|²S)⁻¹` by diagonalizing the circulant profile.
pub fn theta_exact(s: &VarianceProfile, z: C64) -> Result<DiffusionProfile> {
    if !s.is_circulant() {
        return Err(Error::NotCirculant);
    }
    let m = semicircle_stieltjes(z)?;
    let m2 = m.norm_sqr();
    let n = s.dim();
    let table = cos_table(n);
    let s_hat = even_dft(s.row(0), &table);
    let mut theta_hat = Vec::with_capacity(n);
    for &sh in &s_hat {
        let den = 1.0 - m2 * sh;
        if !(den > 0.0) {
            return Err(Error::invalid(alloc::format!("1 − |m|²ŝ(p) = {den} is not positive")));
        }
        theta_hat.push(m2 * sh / den);
    }
    let theta = even_idft(&theta_hat, &table);
    Ok(DiffusionProfile {
        z,
        constant_mode: theta_hat[0] / n as f64,
        mass: theta_hat[0],
        theta,
        s_hat,
        theta_hat,
        stderr: Vec::new(),
        method: ProfileMethod::Exact,
    })
}

/// Continuum approximation `θ(p) = 1/(αη + W²Dp²)` on the momenta `p = 2πk/N`.
pub fn theta_fourier_approx(w: usize, shape: Shape, e: f64, eta: f64, n: usize) -> Result<DiffusionProfile> {
    if w == 0 || n == 0 || !(eta > 0.0) {
        return Err(Error::invalid("need W, N > 0 and η > 0"));
    }
    let a = alpha(e)?;
    let d = shape.diffusion_constant();
    let w = w as f64;
    let table = cos_table(n);
    let theta_hat: Vec<f64> = (0..n)
        .map(|k| {
            // Symmetric momentum in (−π, π].
            let k = if k > n / 2 { k as f64 - n as f64 } else { k as f64 };
            let p = 2.0 * PI * k / n as f64;
            1.0 / (a * eta + w * w * d * p * p)
        })
        .collect();
    let theta = even_idft(&theta_hat, &table);
    Ok(DiffusionProfile {
        z: C64::new(e, eta),
        constant_mode: theta_hat[0] / n as f64,
        mass: theta_hat[0],
        theta,
        s_hat: Vec::new(),
        theta_hat,
        stderr: Vec::new(),
        method: ProfileMethod::FourierApprox,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{band_profile, flat_profile};

    #[test]
    fn large_eta_is_one_neumann_term() {
        let s = band_profile(200, 10, Shape::Uniform).unwrap();
        let z = C64::new(0.0, 2.0);
        let th = theta_exact(&s, z).unwrap();
        let m2 = semicircle_stieltjes(z).unwrap().norm_sqr();
        // Uniform band: (S^k)_0x ≤ s_0x on the support, so the tail is geometric.
        let tail = m2 / (1.0 - m2);
        assert!(tail < 0.21);
        for x in 0..200 {
            let one = m2 * s.get(0, x);
            if one > 0.0 {
                assert!(th.theta[x] >= one);
                assert!(th.theta[x] - one <= tail * one * (1.0 + 1e-12), "x={x}");
            }
        }
        let far = theta_exact(&s, C64::new(0.0, 4.0)).unwrap();
        let m2 = semicircle_stieltjes(C64::new(0.0, 4.0)).unwrap().norm_sqr();
        for x in 0..=10 {
            assert!((far.theta[x] / (m2 * s.get(0, x)) - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn mass_is_im_m_over_eta() {
        let s = band_profile(400, 16, Shape::Uniform).unwrap();
        for eta in [0.2, 0.04, 0.008] {
            let z = C64::new(0.0, eta);
            let th = theta_exact(&s, z).unwrap();
            let target = semicircle_stieltjes(z).unwrap().im / eta;
            assert!((th.mass / target - 1.0).abs() < 0.1);
            let summed: f64 = th.theta.iter().sum();
            assert!((summed / th.mass - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_and_positive() {
        let s = band_profile(101, 7, Shape::TruncatedGaussian { cutoff: 3.0 }).unwrap();
        let th = theta_exact(&s, C64::new(0.5, 0.05)).unwrap();
        for x in 1..101 {
            assert!(th.theta[x] > 0.0);
            assert!((th.theta[x] - th.theta[101 - x]).abs() < 1e-12 * th.peak());
        }
    }

    #[test]
    fn flat_profile_gives_constant_theta_off_diagonal() {
        let s = flat_profile(50).unwrap();
        let th = theta_exact(&s, C64::new(0.0, 0.1)).unwrap();
        for x in 1..50 {
            assert!((th.theta[x] - th.theta[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn approx_constants() {
        assert_eq!(alpha(0.0).unwrap(), 1.0);
        assert!(alpha(2.0).is_err());
        assert!((Shape::Uniform.diffusion_constant() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_circulant() {
        let mut v = alloc::vec![0.0; 9];
        v[0] = 0.5;
        v[1] = 0.5;
        v[3] = 0.5;
        v[4] = 0.5;
        v[8] = 1.0;
        let s = VarianceProfile::custom(3, v).unwrap();
        assert!(theta_exact(&s, C64::new(0.0, 0.1)).is_err());
    }

    // Exponential length from a least-squares fit of log θ_x.
    fn fitted_length(p: &DiffusionProfile, from: usize, to: usize) -> f64 {
        let xs: Vec<f64> = (from..to).map(|x| x as f64).collect();
        let ys: Vec<f64> = (from..to).map(|x| libm::log(p.theta[x])).collect();
        -1.0 / crate::stats::linear_fit(&xs, &ys).unwrap().slope
    }

    #[test]
    fn decay_length_scales_as_inverse_sqrt_eta() {
        let (w, n) = (16, 4000);
        let a = theta_fourier_approx(w, Shape::Uniform, 0.0, 0.04, n).unwrap();
        let b = theta_fourier_approx(w, Shape::Uniform, 0.0, 0.08, n).unwrap();
        let la = fitted_length(&a, 40, 120);
        let lb = fitted_length(&b, 30, 90);
        // Continuum oracle: ℓ = W √(D/(αη)).
        assert!((la - 16.0 * sqrt(1.0 / 6.0 / 0.04)).abs() < 0.05 * la, "{la}");
        assert!((la / lb / core::f64::consts::SQRT_2 - 1.0).abs() < 0.1);
    }

    #[test]
    fn exact_and_approx_agree_in_diffusive_regime() {
        let (w, n) = (16, 400);
        let s = band_profile(n, w, Shape::Uniform).unwrap();
        let mut eta = 0.2;
        while eta >= 0.0016 {
            let ex = theta_exact(&s, C64::new(0.0, eta)).unwrap();
            let ap = theta_fourier_approx(w, Shape::Uniform, 0.0, eta, n).unwrap();
            let l1 = ap.relative_l1(&ex).unwrap();
            assert!(l1 <= 0.2, "eta={eta} l1={l1}");
            eta /= 2.0;
        }
    }
}
