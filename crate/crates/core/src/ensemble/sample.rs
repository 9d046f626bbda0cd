use alloc::string::String;
use alloc::vec::Vec;
use faer::Mat;
use libm::sqrt;

use super::{EntryLaw, ProfileKind, SymmetryClass, VarianceProfile};
use crate::{rng, Error, Result, C64};

/// One Hermitian (or real symmetric) random matrix, stored densely row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSample {
    n: usize,
    class: SymmetryClass,
    re: Vec<f64>,
    /// Imaginary parts; empty for real symmetric matrices.
    im: Vec<f64>,
    seed: u64,
    profile: ProfileKind,
    law: String,
}

const SYMMETRY_TOL: f64 = 0.0;

impl MatrixSample {
    /// Wrap a real symmetric matrix given row-major.
    pub fn from_real(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n || n == 0 {
            return Err(Error::invalid("expected a non-empty n×n matrix"));
        }
        for i in 0..n {
            for j in 0..i {
                if libm::fabs(values[i * n + j] - values[j * n + i]) > SYMMETRY_TOL {
                    return Err(Error::NotHermitian { i, j });
                }
            }
        }
        Ok(Self {
            n,
            class: SymmetryClass::RealSymmetric,
            re: values,
            im: Vec::new(),
            seed: 0,
            profile: ProfileKind::Custom,
            law: "explicit".into(),
        })
    }

    /// Wrap a complex Hermitian matrix given as row-major real and imaginary parts.
    pub fn from_complex(n: usize, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != n * n || im.len() != n * n || n == 0 {
            return Err(Error::invalid("expected non-empty n×n real and imaginary parts"));
        }
        for i in 0..n {
            if im[i * n + i] != 0.0 {
                return Err(Error::NotHermitian { i, j: i });
            }
            for j in 0..i {
                if re[i * n + j] != re[j * n + i] || im[i * n + j] != -im[j * n + i] {
                    return Err(Error::NotHermitian { i, j });
                }
            }
        }
        Ok(Self {
            n,
            class: SymmetryClass::ComplexHermitian,
            re,
            im,
            seed: 0,
            profile: ProfileKind::Custom,
            law: "explicit".into(),
        })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut re = alloc::vec![0.0; n * n];
        for (i, &v) in values.iter().enumerate() {
            re[i * n + i] = v;
        }
        Self {
            n,
            class: SymmetryClass::RealSymmetric,
            re,
            im: Vec::new(),
            seed: 0,
            profile: ProfileKind::Custom,
            law: "explicit".into(),
        }
    }

    /// Re-tag the originating profile (e.g. after a flow that preserves it).
    pub fn with_profile(mut self, profile: ProfileKind) -> Self {
        self.profile = profile;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn is_real(&self) -> bool {
        self.class == SymmetryClass::RealSymmetric
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn profile(&self) -> &ProfileKind {
        &self.profile
    }

    pub fn law_tag(&self) -> &str {
        &self.law
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let k = i * self.n + j;
        C64::new(self.re[k], if self.im.is_empty() { 0.0 } else { self.im[k] })
    }

    pub fn real_parts(&self) -> &[f64] {
        &self.re
    }

    /// Imaginary parts (empty slice for real matrices).
    pub fn imag_parts(&self) -> &[f64] {
        &self.im
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.re[i * self.n + i]).sum()
    }

    /// `a·self + b·other`, keeping this sample's metadata.
    pub fn linear_combination(&self, a: f64, other: &MatrixSample, b: f64) -> Result<MatrixSample> {
        if other.n != self.n || other.class != self.class {
            return Err(Error::invalid("linear combination of incompatible matrices"));
        }
        let mut out = self.clone();
        for (x, y) in out.re.iter_mut().zip(&other.re) {
            *x = a * *x + b * y;
        }
        for (x, y) in out.im.iter_mut().zip(&other.im) {
            *x = a * *x + b * y;
        }
        Ok(out)
    }

    pub fn to_real_mat(&self) -> Result<Mat<f64>> {
        if !self.is_real() {
            return Err(Error::invalid("complex matrix requested as real"));
        }
        Ok(Mat::from_fn(self.n, self.n, |i, j| self.re[i * self.n + j]))
    }

    pub fn to_complex_mat(&self) -> Mat<C64> {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// `H − z` restricted to the indices in `keep`.
    pub fn shifted_submatrix(&self, z: C64, keep: &[usize]) -> Mat<C64> {
        Mat::from_fn(keep.len(), keep.len(), |a, b| {
            let v = self.get(keep[a], keep[b]);
            if a == b {
                v - z
            } else {
                v
            }
        })
    }
}

/// Draw a Hermitian matrix with independent entries of variance `s_ij`.
///
/// Row `i` is generated from its own random stream, so the result does not
/// depend on generation order.
pub fn sample_matrix(profile: &VarianceProfile, law: &EntryLaw, seed: u64) -> MatrixSample {
    let n = profile.dim();
    let complex = law.class() == SymmetryClass::ComplexHermitian;
    let mut re = alloc::vec![0.0; n * n];
    let mut im = if complex { alloc::vec![0.0; n * n] } else { Vec::new() };
    let diag_factor = law.diagonal_factor();
    for i in 0..n {
        let mut r = rng::stream(seed, i as u64);
        for j in 0..i {
            let s = profile.get(i, j);
            if complex {
                let scale = sqrt(0.5 * s);
                let (a, b) = (scale * law.draw(&mut r), scale * law.draw(&mut r));
                re[i * n + j] = a;
                re[j * n + i] = a;
                im[i * n + j] = b;
                im[j * n + i] = -b;
            } else {
                let a = sqrt(s) * law.draw(&mut r);
                re[i * n + j] = a;
                re[j * n + i] = a;
            }
        }
        re[i * n + i] = sqrt(diag_factor * profile.get(i, i)) * law.draw(&mut r);
    }
    MatrixSample {
        n,
        class: law.class(),
        re,
        im,
        seed,
        profile: profile.kind().clone(),
        law: law.tag(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{flat_profile, four_moment_law};
    use crate::stats;

    #[test]
    fn determinism_and_hermitian_symmetry() {
        let p = flat_profile(30).unwrap();
        for law in [EntryLaw::goe(), EntryLaw::gue()] {
            let a = sample_matrix(&p, &law, 11);
            let b = sample_matrix(&p, &law, 11);
            assert_eq!(a, b);
            assert_ne!(a, sample_matrix(&p, &law, 12));
            for i in 0..30 {
                assert_eq!(a.get(i, i).im, 0.0);
                for j in 0..30 {
                    assert_eq!(a.get(i, j), a.get(j, i).conj());
                }
            }
        }
    }

    #[test]
    fn bernoulli_entries_are_signs() {
        let n = 40;
        let p = flat_profile(n).unwrap();
        let h = sample_matrix(&p, &EntryLaw::bernoulli(SymmetryClass::RealSymmetric), 3);
        let root = sqrt(n as f64);
        for v in h.real_parts() {
            assert!(((root * v).abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_entries_have_unit_scaled_variance() {
        let n = 2000;
        let p = flat_profile(n).unwrap();
        let h = sample_matrix(&p, &EntryLaw::gaussian(SymmetryClass::RealSymmetric), 5);
        let root = sqrt(n as f64);
        let xs: Vec<f64> = (1..n).flat_map(|i| (0..i.min(60)).map(move |j| (i, j))).take(100_000).map(|(i, j)| root * h.get(i, j).re).collect();
        assert_eq!(xs.len(), 100_000);
        let se = 1.0 / sqrt(xs.len() as f64);
        assert!(stats::mean(&xs).abs() < 4.0 * se);
        assert!((stats::variance(&xs) - 1.0).abs() < 0.05);
    }

    #[test]
    fn pooled_moments_match_three_point_law() {
        let n = 300;
        let p = flat_profile(n).unwrap();
        let law = four_moment_law(0.0, 3.0, SymmetryClass::RealSymmetric).unwrap();
        let h = sample_matrix(&p, &law, 9);
        let root = sqrt(n as f64);
        let xs: Vec<f64> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| root * h.get(i, j).re).collect();
        assert!(xs.len() >= 10_000);
        let target = law.moments();
        for k in 1..=4 {
            let sample: Vec<f64> = xs.iter().map(|x| libm::pow(*x, k as f64)).collect();
            let se = stats::std_dev(&sample) / sqrt(xs.len() as f64);
            let got = stats::mean(&sample);
            assert!((got - target[k - 1]).abs() <= 5.0 * se.max(1e-12), "k={k}: {got} vs {}", target[k - 1]);
        }
    }

    #[test]
    fn goe_diagonal_is_doubled() {
        let n = 400;
        let p = flat_profile(n).unwrap();
        let d: Vec<f64> = (0..20u64)
            .flat_map(|s| {
                let h = sample_matrix(&p, &EntryLaw::goe(), s);
                (0..n).map(move |i| h.get(i, i).re * sqrt(n as f64)).collect::<Vec<_>>()
            })
            .collect();
        assert!((stats::variance(&d) - 2.0).abs() < 0.15);
    }

    #[test]
    fn complex_entries_split_variance() {
        let n = 300;
        let p = flat_profile(n).unwrap();
        let h = sample_matrix(&p, &EntryLaw::gaussian(SymmetryClass::ComplexHermitian), 21);
        let root = sqrt(n as f64);
        let re: Vec<f64> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| root * h.get(i, j).re).collect();
        let im: Vec<f64> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| root * h.get(i, j).im).collect();
        assert!((stats::variance(&re) - 0.5).abs() < 0.03);
        assert!((stats::variance(&im) - 0.5).abs() < 0.03);
    }

    #[test]
    fn explicit_constructors_validate() {
        assert!(MatrixSample::from_real(2, alloc::vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(MatrixSample::from_real(2, alloc::vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        assert!(MatrixSample::from_complex(2, alloc::vec![0.0, 1.0, 1.0, 0.0], alloc::vec![0.0, 1.0, 1.0, 0.0]).is_err());
        assert!(MatrixSample::from_complex(2, alloc::vec![0.0, 1.0, 1.0, 0.0], alloc::vec![0.0, 1.0, -1.0, 0.0]).is_ok());
    }
}
