use core::f64::consts::PI;
use libm::{asin, sqrt};

use crate::{Error, Result, C64};

/// A limiting one-interval density with a counting function and classical locations.
pub trait DensityModel {
    fn density(&self, x: f64) -> f64;
    /// Mass of `(-∞, x]`.
    fn counting(&self, x: f64) -> f64;
    fn support(&self) -> (f64, f64);

    /// Solve `counting(x) = q` by bisection on the support.
    fn quantile(&self, q: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        if q <= 0.0 {
            return lo;
        }
        if q >= 1.0 {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.counting(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Classical location of the `j`-th of `n` particles (1-based): the `j/n` quantile.
    fn classical_location(&self, j: usize, n: usize) -> f64 {
        self.quantile(j as f64 / n as f64)
    }
}

/// Wigner semicircle law on `[-2, 2]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SemicircleModel;

impl SemicircleModel {
    /// Stieltjes transform `m(z) = ∫ ρ(x)/(x − z) dx`, the root of `m² + zm + 1 = 0`
    /// with `Im m > 0`.
    pub fn stieltjes(&self, z: C64) -> Result<C64> {
        if !(z.im > 0.0) {
            return Err(Error::NonPositiveImaginary(z.im));
        }
        Ok(stieltjes_unchecked(z))
    }
}

pub(crate) fn stieltjes_unchecked(z: C64) -> C64 {
    let s = (z * z - 4.0).sqrt();
    // Larger-modulus root first, the other one is its reciprocal.
    let a = -z + s;
    let b = -z - s;
    let big = if a.norm_sqr() >= b.norm_sqr() { a } else { b } * 0.5;
    let small = big.inv();
    if small.im > 0.0 {
        small
    } else {
        big
    }
}

impl DensityModel for SemicircleModel {
    fn density(&self, x: f64) -> f64 {
        semicircle_density(x)
    }

    fn counting(&self, x: f64) -> f64 {
        semicircle_counting(x)
    }

    fn support(&self) -> (f64, f64) {
        (-2.0, 2.0)
    }
}

pub fn semicircle_density(e: f64) -> f64 {
    let r = 4.0 - e * e;
    if r <= 0.0 {
        0.0
    } else {
        sqrt(r) / (2.0 * PI)
    }
}

/// Closed-form `n(E) = ∫_{-2}^E ρ_sc`.
pub fn semicircle_counting(e: f64) -> f64 {
    if e <= -2.0 {
        return 0.0;
    }
    if e >= 2.0 {
        return 1.0;
    }
    (0.5 + e * sqrt(4.0 - e * e) / (4.0 * PI) + asin(0.5 * e) / PI).clamp(0.0, 1.0)
}

pub fn semicircle_stieltjes(z: C64) -> Result<C64> {
    SemicircleModel.stieltjes(z)
}

/// `γ_j` for the semicircle, `1 ≤ j ≤ n`.
pub fn classical_location(j: usize, n: usize) -> Result<f64> {
    if j == 0 || j > n {
        return Err(Error::invalid("classical location index must satisfy 1 ≤ j ≤ N"));
    }
    if 2 * j == n {
        return Ok(0.0);
    }
    Ok(SemicircleModel.classical_location(j, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn density_values() {
        assert!((semicircle_density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(-2.0), 0.0);
        assert!((semicircle_density(1.0) - 0.275_664).abs() < 1e-6);
        let mass = quad::integrate(semicircle_density, -2.0, 2.0, 1e-13);
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn stieltjes_at_two_i() {
        let m = semicircle_stieltjes(C64::new(0.0, 2.0)).unwrap();
        assert!(m.re.abs() < 1e-15);
        assert!((m.im - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let small = semicircle_stieltjes(C64::new(0.0, 1e-9)).unwrap();
        assert!((small - C64::new(0.0, 1.0)).norm() < 1e-8);
        assert!(semicircle_stieltjes(C64::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn stieltjes_boundary_value_matches_density() {
        let e = 0.8047;
        let m = semicircle_stieltjes(C64::new(e, 1e-6)).unwrap();
        assert!((m.im - PI * semicircle_density(e)).abs() < 1e-5);
    }

    #[test]
    fn stieltjes_identity_on_grid() {
        for k in 0..100 {
            let e = -3.0 + 6.0 * k as f64 / 99.0;
            for eta in [1e-3, 1e-2, 1e-1, 1.0] {
                let z = C64::new(e, eta);
                let m = semicircle_stieltjes(z).unwrap();
                assert!(m.im > 0.0);
                assert!((m + m.inv() + z).norm() <= 1e-12, "E={e} η={eta}");
            }
        }
        let far = C64::new(30.0, 40.0);
        let m = semicircle_stieltjes(far).unwrap();
        assert!((m * far + 1.0).norm() < 1e-3);
    }

    #[test]
    fn stieltjes_matches_quadrature() {
        let z = C64::new(0.5, 0.3);
        let re = quad::integrate(|x| semicircle_density(x) * ((x - z).inv()).re, -2.0, 2.0, 1e-12);
        let im = quad::integrate(|x| semicircle_density(x) * ((x - z).inv()).im, -2.0, 2.0, 1e-12);
        let m = semicircle_stieltjes(z).unwrap();
        assert!((m - C64::new(re, im)).norm() < 1e-9);
    }

    #[test]
    fn counting_matches_quadrature() {
        for e in [-1.9, -1.0, 0.0, 0.4, 1.7] {
            let q = quad::integrate(semicircle_density, -2.0, e, 1e-13);
            assert!((semicircle_counting(e) - q).abs() < 1e-10);
        }
    }

    #[test]
    fn classical_locations() {
        assert_eq!(classical_location(500, 1000).unwrap(), 0.0);
        assert_eq!(classical_location(1000, 1000).unwrap(), 2.0);
        // Independent inversion of n(E) = 3/4 by plain bisection.
        let (mut lo, mut hi) = (0.0, 2.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if semicircle_counting(mid) < 0.75 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let g = classical_location(750, 1000).unwrap();
        assert!((g - lo).abs() < 1e-12);
        assert!((g - 0.807_945_506_6).abs() < 1e-9);
        for n in [10usize, 1000] {
            for j in 1..=n {
                let g = classical_location(j, n).unwrap();
                assert!((semicircle_counting(g) - j as f64 / n as f64).abs() <= 1e-10);
            }
        }
        assert!(classical_location(0, 5).is_err());
    }
}
