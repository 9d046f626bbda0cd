use alloc::string::String;
use alloc::vec::Vec;
use libm::{ceil, floor};

use crate::spectral::{DensityModel, SemicircleModel};
use crate::{stats, Error, Result};

/// Index window `⟦αN, (1 − α)N⟧` (1-based) avoiding the spectral edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkWindow {
    pub alpha: f64,
}

impl Default for BulkWindow {
    fn default() -> Self {
        Self { alpha: 0.1 }
    }
}

impl BulkWindow {
    /// First and last admissible 1-based indices for `n` particles.
    pub fn range(&self, n: usize) -> (usize, usize) {
        let first = (ceil(self.alpha * n as f64) as usize).max(1);
        let last = (floor((1.0 - self.alpha) * n as f64) as usize).min(n);
        (first, last)
    }
}

/// Unfolded nearest-neighbour gaps `N ρ(γ_k)(λ_{k+1} − λ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSample {
    pub gaps: Vec<f64>,
    pub source: String,
}

impl GapSample {
    pub fn mean(&self) -> f64 {
        stats::mean(&self.gaps)
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Unfold the gaps `k = first, …, last − 1` (1-based) of a sorted spectrum.
///
/// Both ends must lie inside the bulk window of `model`'s spectrum.
pub fn unfold<D: DensityModel>(
    lambda: &[f64],
    model: &D,
    first: usize,
    last: usize,
    window: BulkWindow,
) -> Result<GapSample> {
    let n = lambda.len();
    let (lo, hi) = window.range(n);
    if first < lo || last > hi || first >= last {
        return Err(Error::EdgeWindow { first, last, n });
    }
    let gaps = (first..last)
        .map(|k| {
            let gamma = model.classical_location(k, n);
            n as f64 * model.density(gamma) * (lambda[k] - lambda[k - 1])
        })
        .collect();
    Ok(GapSample { gaps, source: String::new() })
}

/// Gaps of the whole bulk window under the semicircle.
pub fn bulk_gaps(lambda: &[f64], window: BulkWindow) -> Result<Vec<f64>> {
    let (first, last) = window.range(lambda.len());
    Ok(unfold(lambda, &SemicircleModel, first, last, window)?.gaps)
}

/// Unfolded positions `N·n(λ_k)` of the bulk window, unit mean spacing.
pub fn unfold_points<D: DensityModel>(lambda: &[f64], model: &D, window: BulkWindow) -> Vec<f64> {
    let n = lambda.len();
    let (first, last) = window.range(n);
    lambda[first - 1..last].iter().map(|&l| n as f64 * model.counting(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{flat_profile, sample_matrix, EntryLaw};
    use crate::spectral::{classical_location, eigenvalues, semicircle_density};

    #[test]
    fn classical_locations_unfold_to_unit_gaps() {
        let n = 2000;
        let g: Vec<f64> = (1..=n).map(|j| classical_location(j, n).unwrap()).collect();
        let gaps = bulk_gaps(&g, BulkWindow::default()).unwrap();
        assert!(gaps.iter().all(|x| (x - 1.0).abs() < 10.0 / n as f64));
    }

    #[test]
    fn equally_spaced_points_follow_density() {
        let n = 400;
        let lambda: Vec<f64> = (0..n).map(|k| -1.0 + 2.0 * k as f64 / (n - 1) as f64).collect();
        let (first, last) = BulkWindow::default().range(n);
        let s = unfold(&lambda, &SemicircleModel, first, last, BulkWindow::default()).unwrap();
        let mid = s.gaps.len() / 2;
        assert!(s.gaps[..mid].windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(s.gaps[mid..].windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let gamma = classical_location(first, n).unwrap();
        let want = n as f64 * semicircle_density(gamma) * 2.0 / (n - 1) as f64;
        assert!((s.gaps[0] - want).abs() < 1e-12);
    }

    #[test]
    fn edge_windows_rejected() {
        let lambda: Vec<f64> = (0..100).map(|k| k as f64).collect();
        assert!(matches!(unfold(&lambda, &SemicircleModel, 1, 50, BulkWindow::default()), Err(Error::EdgeWindow { .. })));
        assert!(unfold(&lambda, &SemicircleModel, 10, 90, BulkWindow::default()).is_ok());
        assert!(unfold(&lambda, &SemicircleModel, 10, 95, BulkWindow::default()).is_err());
    }

    #[test]
    fn goe_bulk_mean_gap() {
        let n = 1000;
        let h = sample_matrix(&flat_profile(n).unwrap(), &EntryLaw::goe(), 3);
        let gaps = bulk_gaps(&eigenvalues(&h).unwrap(), BulkWindow::default()).unwrap();
        assert!((stats::mean(&gaps) - 1.0).abs() < 0.05);
        assert!(gaps.iter().all(|&x| x >= 0.0));
    }
}
