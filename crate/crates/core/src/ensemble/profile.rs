use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{erf, exp, fabs, sqrt};

use crate::{Error, Result};

/// Shape function `f` of a band profile: a symmetric probability density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Density 1/2 on `[-1, 1]`.
    Uniform,
    /// Standard Gaussian truncated to `[-cutoff, cutoff]` and renormalized.
    TruncatedGaussian { cutoff: f64 },
}

impl Shape {
    pub const DEFAULT_GAUSSIAN_CUTOFF: f64 = 3.0;

    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "uniform" => Ok(Shape::Uniform),
            "gaussian" => Ok(Shape::TruncatedGaussian { cutoff: Self::DEFAULT_GAUSSIAN_CUTOFF }),
            other => Err(Error::invalid(alloc::format!("unknown shape id `{other}`"))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Shape::Uniform => "uniform",
            Shape::TruncatedGaussian { .. } => "gaussian",
        }
    }

    /// Half-width of the support.
    pub fn cutoff(&self) -> f64 {
        match *self {
            Shape::Uniform => 1.0,
            Shape::TruncatedGaussian { cutoff } => cutoff,
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let c = self.cutoff();
        if fabs(x) > c {
            return 0.0;
        }
        match *self {
            Shape::Uniform => 0.5,
            Shape::TruncatedGaussian { cutoff } => {
                let mass = erf(cutoff / core::f64::consts::SQRT_2);
                exp(-0.5 * x * x) / (sqrt(2.0 * PI) * mass)
            }
        }
    }

    /// `D = ½ ∫ x² f(x) dx`.
    pub fn diffusion_constant(&self) -> f64 {
        match *self {
            Shape::Uniform => 1.0 / 6.0,
            Shape::TruncatedGaussian { cutoff } => {
                // Second moment of the truncated standard normal.
                let mass = erf(cutoff / core::f64::consts::SQRT_2);
                let phi = exp(-0.5 * cutoff * cutoff) / sqrt(2.0 * PI);
                0.5 * (1.0 - 2.0 * cutoff * phi / mass)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Flat,
    Band { width: usize, shape: Shape },
    Custom,
}

impl ProfileKind {
    pub fn tag(&self) -> String {
        match self {
            ProfileKind::Flat => "flat".into(),
            ProfileKind::Band { width, shape } => alloc::format!("band(W={width},{})", shape.id()),
            ProfileKind::Custom => "custom".into(),
        }
    }
}

/// Symmetric, doubly stochastic matrix of entry variances `s_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    n: usize,
    values: Vec<f64>,
    m: f64,
    kind: ProfileKind,
}

const STOCHASTIC_TOL: f64 = 1e-12;

/// Periodic distance on the discrete torus of length `n`.
pub fn torus_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Standard Wigner profile `s_ij = 1/N`.
pub fn flat_profile(n: usize) -> Result<VarianceProfile> {
    if n == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let v = 1.0 / n as f64;
    Ok(VarianceProfile { n, values: alloc::vec![v; n * n], m: n as f64, kind: ProfileKind::Flat })
}

/// Band profile `s_ij ∝ f(|i−j|_N / W) / W`, each row rescaled to sum to one.
///
/// Rows of a torus-distance profile are cyclic shifts of one another, so the
/// common rescaling keeps the matrix symmetric.
pub fn band_profile(n: usize, width: usize, shape: Shape) -> Result<VarianceProfile> {
    if n == 0 || width == 0 {
        return Err(Error::invalid("dimension and band width must be positive"));
    }
    if width > n {
        return Err(Error::BandTooWide { width, n });
    }
    let w = width as f64;
    let row0: Vec<f64> = (0..n).map(|j| shape.density(torus_distance(0, j, n) as f64 / w) / w).collect();
    let total: f64 = row0.iter().sum();
    let row0: Vec<f64> = row0.iter().map(|v| v / total).collect();
    let mut values = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] = row0[(j + n - i) % n];
        }
    }
    let max = row0.iter().copied().fold(0.0, f64::max);
    Ok(VarianceProfile { n, values, m: 1.0 / max, kind: ProfileKind::Band { width, shape } })
}

impl VarianceProfile {
    /// Validate and wrap an arbitrary row-major variance matrix.
    pub fn custom(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return Err(Error::invalid("profile must be a non-empty n×n matrix"));
        }
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                let v = values[i * n + j];
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::invalid(alloc::format!("s[{i},{j}] = {v} is not a variance")));
                }
                if v != values[j * n + i] {
                    return Err(Error::invalid(alloc::format!("profile not symmetric at ({i},{j})")));
                }
                row += v;
            }
            if fabs(row - 1.0) > STOCHASTIC_TOL {
                return Err(Error::invalid(alloc::format!("row {i} sums to {row}, not 1")));
            }
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        Ok(Self { n, values, m: 1.0 / max, kind: ProfileKind::Custom })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `M = 1 / max s_ij`.
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Row-major entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, ProfileKind::Flat)
    }

    /// True when `s_ij` depends only on `(j − i) mod N`.
    pub fn is_circulant(&self) -> bool {
        match self.kind {
            ProfileKind::Flat | ProfileKind::Band { .. } => true,
            ProfileKind::Custom => {
                let n = self.n;
                (1..n).all(|i| (0..n).all(|j| self.get(i, j) == self.get(0, (j + n - i) % n)))
            }
        }
    }

    /// Largest deviation of a row sum from one.
    pub fn stochasticity_error(&self) -> f64 {
        (0..self.n).map(|i| fabs(self.row(i).iter().sum::<f64>() - 1.0)).fold(0.0, f64::max)
    }
}

/// Size-independent description of a profile family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSpec {
    Flat,
    Band { width: usize, shape: Shape },
    /// Band of width `round(N^exponent)`.
    BandPower { exponent: f64, shape: Shape },
}

impl ProfileSpec {
    pub fn build(&self, n: usize) -> Result<VarianceProfile> {
        match *self {
            ProfileSpec::Flat => flat_profile(n),
            ProfileSpec::Band { width, shape } => band_profile(n, width, shape),
            ProfileSpec::BandPower { exponent, shape } => {
                let w = libm::round(libm::pow(n as f64, exponent)).max(1.0) as usize;
                band_profile(n, w.min(n), shape)
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            ProfileSpec::Flat => "flat".into(),
            ProfileSpec::Band { width, shape } => alloc::format!("band(W={width},{})", shape.id()),
            ProfileSpec::BandPower { exponent, shape } => alloc::format!("band(W=N^{exponent},{})", shape.id()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_profile_values() {
        let p = flat_profile(4).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.25));
        assert_eq!(p.m(), 4.0);
        let one = flat_profile(1).unwrap();
        assert_eq!(one.get(0, 0), 1.0);
        let big = flat_profile(1000).unwrap();
        assert!(big.stochasticity_error() < 1e-12);
        assert!(flat_profile(0).is_err());
    }

    #[test]
    fn small_uniform_band() {
        // Raw entries are 1/8 for |i-j|_8 <= 4, which already sum to one.
        let p = band_profile(8, 4, Shape::Uniform).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert!((p.get(i, j) - 0.125).abs() < 1e-15);
            }
        }
        assert!(p.stochasticity_error() < 1e-12);
    }

    #[test]
    fn degenerate_band_equals_flat() {
        let p = band_profile(10, 10, Shape::Uniform).unwrap();
        let f = flat_profile(10).unwrap();
        for (a, b) in p.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((p.m() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn band_cutoff_and_m() {
        let (n, w) = (400, 16);
        let p = band_profile(n, w, Shape::Uniform).unwrap();
        for j in 0..n {
            let d = torus_distance(0, j, n);
            if d > w {
                assert_eq!(p.get(0, j), 0.0);
            } else {
                assert!((p.get(0, j) - 1.0 / 33.0).abs() < 1e-15);
            }
        }
        // 2W + 1 equal entries per row.
        assert!((p.m() - 33.0).abs() < 1e-9);
        let g = band_profile(n, w, Shape::from_id("gaussian").unwrap()).unwrap();
        assert!((0..n).all(|j| torus_distance(5, j, n) as f64 <= 3.0 * w as f64 || g.get(5, j) == 0.0));
        assert!(g.stochasticity_error() < 1e-12);
        assert!(g.is_circulant());
    }

    #[test]
    fn band_wider_than_dimension_is_rejected() {
        assert_eq!(band_profile(8, 9, Shape::Uniform), Err(Error::BandTooWide { width: 9, n: 8 }));
    }

    #[test]
    fn shape_diffusion_constants() {
        assert!((Shape::Uniform.diffusion_constant() - 1.0 / 6.0).abs() < 1e-15);
        // Direct quadrature of ½∫x²f.
        let g = Shape::TruncatedGaussian { cutoff: 3.0 };
        let d = crate::quad::integrate(|x| 0.5 * x * x * g.density(x), -3.0, 3.0, 1e-13);
        assert!((d - g.diffusion_constant()).abs() < 1e-10);
        let mass = crate::quad::integrate(|x| g.density(x), -3.0, 3.0, 1e-13);
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn custom_profile_validation() {
        assert!(VarianceProfile::custom(2, alloc::vec![0.5, 0.5, 0.5, 0.5]).is_ok());
        assert!(VarianceProfile::custom(2, alloc::vec![0.6, 0.4, 0.5, 0.5]).is_err());
        assert!(VarianceProfile::custom(2, alloc::vec![0.9, 0.1, 0.1, 0.8]).is_err());
        let c = VarianceProfile::custom(2, alloc::vec![0.25, 0.75, 0.75, 0.25]).unwrap();
        assert!((c.m() - 4.0 / 3.0).abs() < 1e-15);
        assert!(c.is_circulant());
    }
}
