use alloc::vec::Vec;
use faer::{Mat, Side};

use crate::ensemble::MatrixSample;
use crate::{Error, Result, C64};

/// Orthonormal eigenvectors stored as matrix columns.
#[derive(Debug, Clone)]
pub enum Eigenvectors {
    Real(Mat<f64>),
    Complex(Mat<C64>),
}

impl Eigenvectors {
    #[inline]
    pub fn get(&self, i: usize, alpha: usize) -> C64 {
        match self {
            Eigenvectors::Real(u) => C64::new(u[(i, alpha)], 0.0),
            Eigenvectors::Complex(u) => u[(i, alpha)],
        }
    }

    #[inline]
    pub fn abs_sq(&self, i: usize, alpha: usize) -> f64 {
        match self {
            Eigenvectors::Real(u) => u[(i, alpha)] * u[(i, alpha)],
            Eigenvectors::Complex(u) => u[(i, alpha)].norm_sqr(),
        }
    }
}

/// Sorted eigenvalues of one sample, with eigenvectors when requested.
#[derive(Debug, Clone)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    vectors: Option<Eigenvectors>,
}

impl SpectralData {
    /// Wrap eigenvalues only; they are sorted on construction.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues, vectors: None }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn into_eigenvalues(self) -> Vec<f64> {
        self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vectors(&self) -> Option<&Eigenvectors> {
        self.vectors.as_ref()
    }

    /// `N · max_i |u_α(i)|²` for every α.
    pub fn sup_norms_scaled(&self) -> Result<Vec<f64>> {
        let u = self.vectors.as_ref().ok_or_else(|| Error::invalid("eigenvectors were not computed"))?;
        let n = self.len();
        Ok((0..n)
            .map(|a| (0..n).map(|i| u.abs_sq(i, a)).fold(0.0, f64::max) * n as f64)
            .collect())
    }

    /// Empirical counting function `#{α : λ_α ≤ E} / N`.
    pub fn counting(&self, e: f64) -> f64 {
        self.eigenvalues.partition_point(|&l| l <= e) as f64 / self.len() as f64
    }

    /// Diagonal resolvent entries `G_ii(z) = Σ_α |u_α(i)|² / (λ_α − z)`.
    pub fn resolvent_diagonal(&self, z: C64) -> Result<Vec<C64>> {
        if !(z.im > 0.0) {
            return Err(Error::NonPositiveImaginary(z.im));
        }
        let u = self.vectors.as_ref().ok_or_else(|| Error::invalid("eigenvectors were not computed"))?;
        let n = self.len();
        let w: Vec<C64> = self.eigenvalues.iter().map(|&l| (C64::new(l, 0.0) - z).inv()).collect();
        Ok((0..n).map(|i| (0..n).map(|a| w[a] * u.abs_sq(i, a)).sum()).collect())
    }
}

/// Dense Hermitian eigendecomposition.
pub fn eigen_decompose(h: &MatrixSample, want_vectors: bool) -> Result<SpectralData> {
    let (eigenvalues, vectors) = if h.is_real() {
        let a = h.to_real_mat()?;
        if want_vectors {
            let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
            let vals = (0..h.dim()).map(|k| evd.S()[k]).collect();
            (vals, Some(Eigenvectors::Real(evd.U().to_owned())))
        } else {
            (a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence)?, None)
        }
    } else {
        let a = h.to_complex_mat();
        if want_vectors {
            let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
            let vals = (0..h.dim()).map(|k| evd.S()[k].re).collect();
            (vals, Some(Eigenvectors::Complex(evd.U().to_owned())))
        } else {
            (a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence)?, None)
        }
    };
    let eigenvalues: Vec<f64> = eigenvalues;
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence);
    }
    debug_assert!(eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    Ok(SpectralData { eigenvalues, vectors })
}

/// Eigenvalues only, the common fast path.
pub fn eigenvalues(h: &MatrixSample) -> Result<Vec<f64>> {
    Ok(eigen_decompose(h, false)?.into_eigenvalues())
}

/// Eigenvalues of a real symmetric tridiagonal matrix.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if off.len() + 1 != n.max(1) {
        return Err(Error::invalid("off-diagonal length must be N − 1"));
    }
    let a = Mat::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i == j + 1 {
            off[j]
        } else if j == i + 1 {
            off[i]
        } else {
            0.0
        }
    });
    let mut v = a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence)?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{flat_profile, sample_matrix, EntryLaw};

    #[test]
    fn two_by_two_cases() {
        let d = eigen_decompose(&MatrixSample::diagonal(&[1.0, -1.0]), true).unwrap();
        assert_eq!(d.eigenvalues(), &[-1.0, 1.0]);
        let h = MatrixSample::from_real(2, alloc::vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let d = eigen_decompose(&h, true).unwrap();
        assert!((d.eigenvalues()[0] + 1.0).abs() < 1e-14 && (d.eigenvalues()[1] - 1.0).abs() < 1e-14);
        let u = d.vectors().unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        // (1, -1)/√2 for λ = -1, (1, 1)/√2 for λ = 1, up to sign.
        assert!(((u.get(0, 0) * u.get(1, 0).conj()).re + 0.5).abs() < 1e-14);
        assert!(((u.get(0, 1) * u.get(1, 1).conj()).re - 0.5).abs() < 1e-14);
        assert!((u.get(0, 0).norm() - r).abs() < 1e-14);
    }

    fn check_decomposition(h: &MatrixSample) {
        let n = h.dim();
        let d = eigen_decompose(h, true).unwrap();
        let u = d.vectors().unwrap();
        let scale = d.eigenvalues().iter().fold(1.0f64, |a, l| a.max(l.abs()));
        for a in 0..n {
            for b in 0..n {
                let g: C64 = (0..n).map(|i| u.get(i, a).conj() * u.get(i, b)).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - want).norm() < 1e-9);
            }
            for i in 0..n {
                let hu: C64 = (0..n).map(|j| h.get(i, j) * u.get(j, a)).sum();
                assert!((hu - u.get(i, a) * d.eigenvalues()[a]).norm() < 1e-8 * scale);
            }
        }
        let tr: f64 = d.eigenvalues().iter().sum();
        assert!((tr - h.trace()).abs() <= 1e-9 * h.trace().abs().max(1.0));
        let only = eigenvalues(h).unwrap();
        for (x, y) in only.iter().zip(d.eigenvalues()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn random_decompositions() {
        let p = flat_profile(50).unwrap();
        check_decomposition(&sample_matrix(&p, &EntryLaw::goe(), 1));
        check_decomposition(&sample_matrix(&p, &EntryLaw::gue(), 2));
    }

    #[test]
    fn resolvent_diagonal_from_spectrum() {
        let d = eigen_decompose(&MatrixSample::diagonal(&[1.0, -1.0]), true).unwrap();
        let z = C64::new(0.0, 1.0);
        let g = d.resolvent_diagonal(z).unwrap();
        assert!((g[0] - C64::new(1.0, -1.0).inv()).norm() < 1e-15);
        assert!((g[1] - C64::new(-1.0, -1.0).inv()).norm() < 1e-15);
        assert_eq!(d.counting(0.0), 0.5);
    }

    #[test]
    fn tridiagonal_path() {
        let v = tridiagonal_eigenvalues(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        assert_eq!(tridiagonal_eigenvalues(&[3.0], &[]).unwrap(), alloc::vec![3.0]);
    }
}
