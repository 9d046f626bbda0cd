use alloc::vec::Vec;
use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Mat;

use super::eigen::eigen_decompose;
use crate::ensemble::MatrixSample;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventMode {
    /// Every entry, by LU inversion of `H − z`.
    Full,
    /// Diagonal entries only, from the eigendecomposition.
    Diagonal,
}

#[derive(Debug, Clone)]
pub enum ResolventEntries {
    Full(Mat<C64>),
    Diagonal(Vec<C64>),
}

/// `G(z) = (H − z)^{-1}` and derived scalars.
#[derive(Debug, Clone)]
pub struct ResolventData {
    z: C64,
    entries: ResolventEntries,
    m_n: C64,
    /// Empirical counting function at `Re z`, available when eigenvalues were computed.
    counting: Option<f64>,
}

impl ResolventData {
    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn eta(&self) -> f64 {
        self.z.im
    }

    pub fn dim(&self) -> usize {
        match &self.entries {
            ResolventEntries::Full(g) => g.nrows(),
            ResolventEntries::Diagonal(d) => d.len(),
        }
    }

    pub fn entries(&self) -> &ResolventEntries {
        &self.entries
    }

    pub fn full(&self) -> Option<&Mat<C64>> {
        match &self.entries {
            ResolventEntries::Full(g) => Some(g),
            ResolventEntries::Diagonal(_) => None,
        }
    }

    /// Entry `G_ij`; off-diagonal entries need full mode.
    pub fn get(&self, i: usize, j: usize) -> Result<C64> {
        match &self.entries {
            ResolventEntries::Full(g) => Ok(g[(i, j)]),
            ResolventEntries::Diagonal(d) if i == j => Ok(d[i]),
            ResolventEntries::Diagonal(_) => Err(Error::invalid("off-diagonal entry requested in diagonal mode")),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        match &self.entries {
            ResolventEntries::Full(g) => (0..g.nrows()).map(|i| g[(i, i)]).collect(),
            ResolventEntries::Diagonal(d) => d.clone(),
        }
    }

    /// `m_N = N^{-1} tr G`.
    pub fn m_n(&self) -> C64 {
        self.m_n
    }

    pub fn counting(&self) -> Option<f64> {
        self.counting
    }

    /// `max_{ij} |((H − z)G − I)_{ij}|`; full mode only.
    pub fn solve_residual(&self, h: &MatrixSample) -> Result<f64> {
        let g = self.full().ok_or_else(|| Error::invalid("residual needs full mode"))?;
        let n = g.nrows();
        let a = h.shifted_submatrix(self.z, &(0..n).collect::<Vec<_>>());
        let prod = &a * g;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - want).norm());
            }
        }
        Ok(worst)
    }
}

fn check_z(z: C64) -> Result<()> {
    if z.im > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveImaginary(z.im))
    }
}

/// Inverse of `(H − z)` restricted to `keep`, i.e. the resolvent of a minor.
pub(crate) fn inverse_shifted(h: &MatrixSample, z: C64, keep: &[usize]) -> Mat<C64> {
    let a = h.shifted_submatrix(z, keep);
    a.partial_piv_lu().inverse()
}

pub fn resolvent(h: &MatrixSample, z: C64, mode: ResolventMode) -> Result<ResolventData> {
    check_z(z)?;
    let n = h.dim();
    match mode {
        ResolventMode::Full => {
            let g = inverse_shifted(h, z, &(0..n).collect::<Vec<_>>());
            let m_n = (0..n).map(|i| g[(i, i)]).sum::<C64>() / n as f64;
            if !(m_n.re.is_finite() && m_n.im.is_finite()) {
                return Err(Error::Singular("H − z".into()));
            }
            Ok(ResolventData { z, entries: ResolventEntries::Full(g), m_n, counting: None })
        }
        ResolventMode::Diagonal => {
            let spec = eigen_decompose(h, true)?;
            let d = spec.resolvent_diagonal(z)?;
            let m_n = d.iter().sum::<C64>() / n as f64;
            Ok(ResolventData { z, entries: ResolventEntries::Diagonal(d), m_n, counting: Some(spec.counting(z.re)) })
        }
    }
}

/// Column `j` of `G(z)` from a single linear solve.
pub fn resolvent_column(h: &MatrixSample, z: C64, j: usize) -> Result<Vec<C64>> {
    check_z(z)?;
    let n = h.dim();
    if j >= n {
        return Err(Error::invalid("column index out of range"));
    }
    let a = h.shifted_submatrix(z, &(0..n).collect::<Vec<_>>());
    let mut rhs = Mat::<C64>::zeros(n, 1);
    rhs[(j, 0)] = C64::new(1.0, 0.0);
    a.partial_piv_lu().solve_in_place(&mut rhs);
    Ok((0..n).map(|i| rhs[(i, 0)]).collect())
}

/// `N^{-1} Σ_α 1/(λ_α − z)`.
pub fn empirical_stieltjes(eigenvalues: &[f64], z: C64) -> Result<C64> {
    check_z(z)?;
    if eigenvalues.is_empty() {
        return Err(Error::invalid("empty spectrum"));
    }
    Ok(eigenvalues.iter().map(|&l| (C64::new(l, 0.0) - z).inv()).sum::<C64>() / eigenvalues.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{flat_profile, sample_matrix, EntryLaw};
    use crate::spectral::{eigenvalues, semicircle_stieltjes};

    #[test]
    fn diagonal_matrix_resolvent() {
        let h = MatrixSample::diagonal(&[1.0, -1.0]);
        let z = C64::new(0.0, 1.0);
        for mode in [ResolventMode::Full, ResolventMode::Diagonal] {
            let r = resolvent(&h, z, mode).unwrap();
            assert!((r.get(0, 0).unwrap() - C64::new(1.0, -1.0).inv()).norm() < 1e-15);
            assert!((r.get(1, 1).unwrap() - C64::new(-1.0, -1.0).inv()).norm() < 1e-15);
            assert!((r.m_n() - C64::new(0.0, 0.5)).norm() < 1e-15);
        }
        let a = 0.7;
        let one = MatrixSample::diagonal(&[a]);
        let z = C64::new(0.2, 0.3);
        let r = resolvent(&one, z, ResolventMode::Full).unwrap();
        assert!((r.get(0, 0).unwrap() - (a - z).inv()).norm() < 1e-15);
        assert!(resolvent(&one, C64::new(0.0, 0.0), ResolventMode::Full).is_err());
    }

    #[test]
    fn random_solve_residual_and_symmetry() {
        let p = flat_profile(100).unwrap();
        let h = sample_matrix(&p, &EntryLaw::goe(), 4);
        let z = C64::new(0.1, 0.05);
        let r = resolvent(&h, z, ResolventMode::Full).unwrap();
        assert!(r.solve_residual(&h).unwrap() <= 1e-9);
        let g = r.full().unwrap();
        for i in 0..100 {
            for j in 0..100 {
                assert!((g[(i, j)] - g[(j, i)]).norm() < 1e-10);
            }
        }
        assert!(r.m_n().im > 0.0);
        let col = resolvent_column(&h, z, 17).unwrap();
        for i in 0..100 {
            assert!((col[i] - g[(i, 17)]).norm() < 1e-10);
        }
        let d = resolvent(&h, z, ResolventMode::Diagonal).unwrap();
        for (a, b) in d.diagonal().iter().zip(r.diagonal()) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn empirical_stieltjes_routes_agree() {
        assert!((empirical_stieltjes(&[-1.0, 1.0], C64::new(0.0, 1.0)).unwrap() - C64::new(0.0, 0.5)).norm() < 1e-15);
        let eta = 0.25;
        let m = empirical_stieltjes(&[0.0; 5], C64::new(0.0, eta)).unwrap();
        assert!((m - C64::new(0.0, 1.0 / eta)).norm() < 1e-12);
        let p = flat_profile(100).unwrap();
        for (seed, law) in [(1, EntryLaw::goe()), (2, EntryLaw::gue())] {
            let h = sample_matrix(&p, &law, seed);
            let z = C64::new(-0.4, 0.02);
            let a = empirical_stieltjes(&eigenvalues(&h).unwrap(), z).unwrap();
            let b = resolvent(&h, z, ResolventMode::Full).unwrap().m_n();
            assert!((a - b).norm() <= 1e-9 * b.norm());
        }
    }

    #[test]
    fn macroscopic_convergence() {
        let p = flat_profile(500).unwrap();
        let h = sample_matrix(&p, &EntryLaw::goe(), 8);
        let z = C64::new(0.0, 1.0);
        let m = empirical_stieltjes(&eigenvalues(&h).unwrap(), z).unwrap();
        assert!((m - semicircle_stieltjes(z).unwrap()).norm() <= 0.1);
    }
}
