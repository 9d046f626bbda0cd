use alloc::vec::Vec;
use core::f64::consts::PI;
use faer::Mat;
use libm::{exp, log, round, sin, sqrt};

use crate::{quad, Error, Result};

/// A reference law on the real line with a finite window carrying its mass.
pub trait Reference {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// Interval outside of which the mass is negligible (used for binning).
    fn window(&self) -> (f64, f64);

    fn quantile(&self, q: f64) -> f64 {
        let (mut lo, mut hi) = self.window();
        while self.cdf(hi) < q && hi < 1e6 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn mean(&self) -> f64 {
        let (a, b) = self.window();
        quad::integrate(|x| x * self.pdf(x), a, b, 1e-12)
    }

    fn variance(&self) -> f64 {
        let (a, b) = self.window();
        let mu = self.mean();
        quad::integrate(|x| (x - mu) * (x - mu) * self.pdf(x), a, b, 1e-12)
    }
}

/// Nearest-gap density `(πs/2) e^{−πs²/4}`.
pub fn surmise_pdf(s: f64) -> f64 {
    if s < 0.0 {
        0.0
    } else {
        0.5 * PI * s * exp(-0.25 * PI * s * s)
    }
}

pub fn surmise_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        1.0 - exp(-0.25 * PI * s * s)
    }
}

pub fn surmise_quantile(q: f64) -> f64 {
    sqrt(-4.0 * log(1.0 - q) / PI)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Surmise;

impl Reference for Surmise {
    fn pdf(&self, x: f64) -> f64 {
        surmise_pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        surmise_cdf(x)
    }
    fn window(&self) -> (f64, f64) {
        (0.0, 7.0)
    }
    fn quantile(&self, q: f64) -> f64 {
        surmise_quantile(q)
    }
}

/// Unit-mean exponential law, the gap law of independent points.
#[derive(Debug, Clone, Copy, Default)]
pub struct Exponential;

impl Reference for Exponential {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            exp(-x)
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            1.0 - exp(-x)
        }
    }
    fn window(&self) -> (f64, f64) {
        (0.0, 40.0)
    }
    fn quantile(&self, q: f64) -> f64 {
        -log(1.0 - q)
    }
}

/// `K(r) = sin(πr)/(πr)`, `K(0) = 1`.
pub fn sine_kernel(r: f64) -> f64 {
    if r.abs() < 1e-8 {
        1.0 - (PI * r) * (PI * r) / 6.0
    } else {
        sin(PI * r) / (PI * r)
    }
}

/// `det[K(α_i − α_j)]`.
pub fn npoint_correlation(alpha: &[f64]) -> f64 {
    let n = alpha.len();
    if n == 0 {
        return 1.0;
    }
    Mat::<f64>::from_fn(n, n, |i, j| sine_kernel(alpha[i] - alpha[j])).determinant()
}

/// `1 − K(r)²`, the two-point function of the determinantal sine process.
pub fn pair_correlation_reference(r: f64) -> f64 {
    let k = sine_kernel(r);
    1.0 - k * k
}

/// Default box-kernel width in unfolded units.
pub const PAIR_KERNEL_WIDTH: f64 = 0.1;

/// Binned estimate of the two-point function.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    pub width: f64,
    pub centers: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Reference points used (those at least `r_max` from both ends).
    pub reference_points: usize,
}

impl CorrelationCurve {
    /// `Σ_b |value_b − avg_b f| · width` with `avg_b f` the bin average of `f`.
    pub fn l1_to<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let h = self.width;
        self.centers
            .iter()
            .zip(&self.values)
            .map(|(&c, &v)| (v - quad::integrate(&f, c - 0.5 * h, c + 0.5 * h, 1e-12) / h).abs() * h)
            .sum()
    }

    pub fn sup_deviation_from(&self, level: f64) -> f64 {
        self.values.iter().map(|v| (v - level).abs()).fold(0.0, f64::max)
    }
}

/// Box-kernel estimate of the pair correlation of unit-density point sets on `[0, r_max)`.
///
/// Each set is sorted internally; only points at distance `≥ r_max` from the
/// ends of their set serve as reference points, so no edge correction is needed.
pub fn pair_correlation(sets: &[Vec<f64>], r_max: f64, width: f64) -> Result<CorrelationCurve> {
    if !(width > 0.0 && r_max > width) {
        return Err(Error::invalid("need 0 < width < r_max"));
    }
    let bins = round(r_max / width) as usize;
    let mut total = alloc::vec![0.0; bins];
    let mut per_set: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut refs = 0usize;
    for set in sets {
        let mut x = set.clone();
        x.sort_by(f64::total_cmp);
        let Some((&lo, &hi)) = x.first().zip(x.last()) else { continue };
        let mut counts = alloc::vec![0.0; bins];
        let mut nref = 0usize;
        for (i, &xi) in x.iter().enumerate() {
            if xi < lo + r_max || xi > hi - r_max {
                continue;
            }
            nref += 1;
            for &xj in x[i + 1..].iter().take_while(|&&xj| xj - xi < r_max) {
                counts[((xj - xi) / width) as usize % bins] += 1.0;
            }
            for &xj in x[..i].iter().rev().take_while(|&&xj| xi - xj < r_max) {
                counts[((xi - xj) / width) as usize % bins] += 1.0;
            }
        }
        if nref > 0 {
            for b in 0..bins {
                total[b] += counts[b];
            }
            refs += nref;
            per_set.push((nref, counts));
        }
    }
    if refs == 0 {
        return Err(Error::InsufficientData("no reference points away from the set ends".into()));
    }
    let norm = |c: f64, r: usize| c / (r as f64 * 2.0 * width);
    let values: Vec<f64> = total.iter().map(|&c| norm(c, refs)).collect();
    let stderr = if per_set.len() >= 2 {
        // Between-set spread of the per-set estimates, weighted by reference counts.
        let k = per_set.len() as f64;
        (0..bins)
            .map(|b| {
                let var = per_set
                    .iter()
                    .map(|(r, c)| {
                        let d = norm(c[b], *r) - values[b];
                        (*r as f64) * d * d
                    })
                    .sum::<f64>()
                    / refs as f64;
                sqrt(var / (k - 1.0))
            })
            .collect()
    } else {
        total.iter().map(|&c| norm(sqrt(c.max(1.0)), refs)).collect()
    };
    let centers = (0..bins).map(|b| (b as f64 + 0.5) * width).collect();
    Ok(CorrelationCurve { width, centers, values, stderr, reference_points: refs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn surmise_values_and_normalisation() {
        assert_eq!(surmise_pdf(0.0), 0.0);
        assert!((surmise_pdf(1.0) - 0.716_186).abs() < 1e-6);
        let mass = quad::integrate(surmise_pdf, 0.0, 12.0, 1e-13);
        let mean = quad::integrate(|s| s * surmise_pdf(s), 0.0, 12.0, 1e-13);
        assert!((mass - 1.0).abs() < 1e-8 && (mean - 1.0).abs() < 1e-8);
        assert!((Surmise.mean() - 1.0).abs() < 1e-8);
        let e = quad::integrate(|x| Exponential.pdf(x), 0.0, 40.0, 1e-13);
        assert!((e - 1.0).abs() < 1e-8);
        for q in [0.1, 0.5, 0.9] {
            assert!((surmise_cdf(surmise_quantile(q)) - q).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_kernel_values() {
        assert_eq!(sine_kernel(0.0), 1.0);
        assert!(sine_kernel(1.0).abs() < 1e-15);
        assert!((sine_kernel(0.5) - 2.0 / PI).abs() < 1e-15);
        assert!((npoint_correlation(&[0.0, 0.5]) - (1.0 - 4.0 / (PI * PI))).abs() < 1e-14);
        assert!((npoint_correlation(&[0.0, 0.5]) - 0.594_72).abs() < 1e-5);
        let mut r = rng::stream(1, 0);
        let a = [rng::uniform(&mut r) * 3.0, rng::uniform(&mut r) * 3.0, rng::uniform(&mut r) * 3.0];
        let v = npoint_correlation(&a);
        for p in [[a[1], a[0], a[2]], [a[2], a[1], a[0]], [a[1], a[2], a[0]]] {
            assert!((npoint_correlation(&p) - v).abs() < 1e-13);
        }
        assert!((npoint_correlation(&[0.3]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_points_have_flat_pair_correlation() {
        let mut r = rng::stream(9, 0);
        let sets: Vec<Vec<f64>> =
            (0..20).map(|_| (0..10_000).map(|_| 10_000.0 * rng::uniform(&mut r)).collect()).collect();
        let c = pair_correlation(&sets, 3.0, PAIR_KERNEL_WIDTH).unwrap();
        assert!(c.sup_deviation_from(1.0) < 0.05, "{}", c.sup_deviation_from(1.0));
    }

    #[test]
    fn lattice_pair_correlation_concentrates() {
        let set: Vec<f64> = (0..200).map(|k| k as f64).collect();
        let c = pair_correlation(&[set], 3.0, 0.3).unwrap();
        // Two neighbours at each integer distance, nothing in between.
        assert_eq!(c.values[1], 0.0);
        assert!((c.values[3] - 1.0 / 0.3).abs() < 1e-12);
    }
}
