use alloc::vec::Vec;
use libm::sqrt;
use rand_distr::{ChiSquared, Distribution};

use crate::spectral::{tridiagonal_eigenvalues, SpectralData};
use crate::{rng, Error, Result};

/// Exact sample of the Gaussian β-ensemble `∝ e^{−βN Σ λ²/4} Π|λ_i − λ_j|^β`
/// from the symmetric tridiagonal model: diagonal `N(0, 2/(βN))`,
/// off-diagonals `χ_{βk}/√(βN)` for `k = N−1, …, 1`.
pub fn tridiagonal_sample(n: usize, beta: f64, seed: u64) -> Result<SpectralData> {
    if n == 0 || !(beta > 0.0) {
        return Err(Error::invalid("need N ≥ 1 and β > 0"));
    }
    let scale = 1.0 / sqrt(beta * n as f64);
    let mut r = rng::stream(seed, 0);
    let diag: Vec<f64> = (0..n).map(|_| sqrt(2.0) * scale * rng::normal(&mut r)).collect();
    let off = (1..n)
        .map(|i| {
            let dof = beta * (n - i) as f64;
            let chi2 = ChiSquared::new(dof).map_err(|_| Error::invalid("bad χ² degrees of freedom"))?;
            Ok(scale * sqrt(chi2.sample(&mut r)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SpectralData::from_eigenvalues(tridiagonal_eigenvalues(&diag, &off)?))
}
