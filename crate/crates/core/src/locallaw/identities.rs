use alloc::vec::Vec;
use faer::Mat;

use crate::ensemble::{MatrixSample, VarianceProfile};
use crate::spectral::{inverse_shifted, ResolventData};
use crate::{Error, Result, C64};

/// Resolvent of the minor obtained by deleting the indices in `removed`,
/// addressed by original indices.
pub struct MinorResolvent {
    pos: Vec<Option<usize>>,
    g: Mat<C64>,
}

impl MinorResolvent {
    pub fn new(h: &MatrixSample, z: C64, removed: &[usize]) -> Result<Self> {
        if !(z.im > 0.0) {
            return Err(Error::NonPositiveImaginary(z.im));
        }
        let n = h.dim();
        if removed.iter().any(|&t| t >= n) {
            return Err(Error::invalid("removed index out of range"));
        }
        let keep: Vec<usize> = (0..n).filter(|i| !removed.contains(i)).collect();
        if keep.is_empty() {
            return Err(Error::invalid("cannot remove every index"));
        }
        let mut pos = alloc::vec![None; n];
        for (a, &i) in keep.iter().enumerate() {
            pos[i] = Some(a);
        }
        Ok(Self { pos, g: inverse_shifted(h, z, &keep) })
    }

    /// `G^{(T)}_{ij}`; zero if either index was removed.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        match (self.pos[i], self.pos[j]) {
            (Some(a), Some(b)) => self.g[(a, b)],
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.pos[i].is_some()
    }
}

fn outside(r: &MinorResolvent, n: usize, skip: usize) -> impl Iterator<Item = usize> + '_ {
    (0..n).filter(move |&q| q != skip && r.contains(q))
}

fn rel(lhs: C64, rhs: C64) -> f64 {
    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    (lhs - rhs).norm() / scale
}

/// Largest relative defect of `Σ_j |G_ij|² = Im G_ii / η` over `i`.
pub fn check_ward(h: &MatrixSample, z: C64) -> Result<f64> {
    let g = MinorResolvent::new(h, z, &[])?;
    Ok(ward_defect(&g, h.dim(), z.im))
}

fn ward_defect(g: &MinorResolvent, n: usize, eta: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in (0..n).filter(|&i| g.contains(i)) {
        let lhs: f64 = (0..n).map(|j| g.get(i, j).norm_sqr()).sum();
        let rhs = g.get(i, i).im / eta;
        worst = worst.max(rel(C64::new(lhs, 0.0), C64::new(rhs, 0.0)));
    }
    worst
}

/// Relative residuals of the exact resolvent identities at one index triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `G_ij = G^{(k)}_ij + G_ik G_kj / G_kk`.
    pub expansion_entry: f64,
    /// `1/G_ii = 1/G^{(k)}_ii − G_ik G_ki / (G_ii G^{(k)}_ii G_kk)`.
    pub expansion_inverse: f64,
    /// `G_ij = −G_ii Σ_k h_ik G^{(i)}_kj`.
    pub column_left: f64,
    /// `G_ij = −G_jj Σ_k G^{(j)}_ik h_kj`.
    pub column_right: f64,
    /// `1/G_ii = h_ii − z − Σ_kl h_ik G^{(i)}_kl h_li`.
    pub schur: f64,
    pub ward: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        [self.expansion_entry, self.expansion_inverse, self.column_left, self.column_right, self.schur, self.ward]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Check the resolvent identities for the minor `G^{(T)}` at indices `i ≠ j`,
/// expanding in `k`. Every minor is obtained by an explicit submatrix solve.
pub fn check_resolvent_identities(
    h: &MatrixSample,
    z: C64,
    i: usize,
    j: usize,
    k: usize,
    t: &[usize],
) -> Result<IdentityReport> {
    let n = h.dim();
    if i >= n || j >= n || k >= n {
        return Err(Error::invalid("index out of range"));
    }
    if i == j || i == k || j == k {
        return Err(Error::IndexCollision("i, j, k must be distinct".into()));
    }
    if t.contains(&i) || t.contains(&j) || t.contains(&k) {
        return Err(Error::IndexCollision("i, j, k must lie outside T".into()));
    }
    let with = |extra: usize| {
        let mut v = t.to_vec();
        v.push(extra);
        v
    };
    let g = MinorResolvent::new(h, z, t)?;
    let gk = MinorResolvent::new(h, z, &with(k))?;
    let gi = MinorResolvent::new(h, z, &with(i))?;
    let gj = MinorResolvent::new(h, z, &with(j))?;

    let expansion_entry = rel(g.get(i, j), gk.get(i, j) + g.get(i, k) * g.get(k, j) / g.get(k, k));
    let expansion_inverse = rel(
        g.get(i, i).inv(),
        gk.get(i, i).inv() - g.get(i, k) * g.get(k, i) / (g.get(i, i) * gk.get(i, i) * g.get(k, k)),
    );
    let left: C64 = outside(&gi, n, i).map(|q| h.get(i, q) * gi.get(q, j)).sum();
    let column_left = rel(g.get(i, j), -g.get(i, i) * left);
    let right: C64 = outside(&gj, n, j).map(|q| gj.get(i, q) * h.get(q, j)).sum();
    let column_right = rel(g.get(i, j), -g.get(j, j) * right);
    let mut quad = C64::new(0.0, 0.0);
    for a in outside(&gi, n, i) {
        let hia = h.get(i, a);
        for b in outside(&gi, n, i) {
            quad += hia * gi.get(a, b) * h.get(b, i);
        }
    }
    let schur = rel(g.get(i, i).inv(), h.get(i, i) - z - quad);
    Ok(IdentityReport {
        expansion_entry,
        expansion_inverse,
        column_left,
        column_right,
        schur,
        ward: ward_defect(&g, n, z.im),
    })
}

/// Per-index terms of the self-consistent equation for `v_i = G_ii − m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfConsistentTerms {
    pub upsilon: C64,
    pub a: C64,
    pub h_ii: f64,
    pub z_fluct: C64,
    /// `|v_i − ((−z − m − (Σ_k s_ik v_k − Υ_i))^{-1} − m)|`.
    pub vself_residual: f64,
}

/// Evaluate `Υ_i = A_i + h_ii − Z_i` for every `i`.
///
/// `Z_i` is the Schur quadratic form minus its partial expectation
/// `Σ_k^{(i)} s_ik G^{(i)}_kk`. Both are expressed through entries of the full
/// resolvent: the quadratic form via the Schur formula and `G^{(i)}_kk` via the
/// first expansion identity, so no minor has to be inverted.
pub fn self_consistent_residual(
    r: &ResolventData,
    profile: &VarianceProfile,
    h: &MatrixSample,
) -> Result<Vec<SelfConsistentTerms>> {
    let g = r.full().ok_or_else(|| Error::invalid("self-consistent terms need a full resolvent"))?;
    let n = g.nrows();
    if n != profile.dim() || n != h.dim() {
        return Err(Error::invalid("dimension mismatch"));
    }
    let z = r.z();
    let m = crate::spectral::stieltjes_unchecked(z);
    let v: Vec<C64> = (0..n).map(|i| g[(i, i)] - m).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let gii = g[(i, i)];
        if gii.norm() < 1e-12 {
            return Err(Error::SmallDiagonal { index: i, modulus: gii.norm() });
        }
        let row = profile.row(i);
        let mut a = C64::new(0.0, 0.0);
        let mut partial = C64::new(0.0, 0.0);
        let mut sv = C64::new(0.0, 0.0);
        for k in 0..n {
            let s = row[k];
            sv += v[k] * s;
            if s == 0.0 {
                continue;
            }
            let cross = g[(i, k)] * g[(k, i)] / gii;
            a += cross * s;
            if k != i {
                partial += (g[(k, k)] - cross) * s;
            }
        }
        let h_ii = h.get(i, i).re;
        let quad = C64::new(h_ii, 0.0) - z - gii.inv();
        let z_fluct = quad - partial;
        let upsilon = a + h_ii - z_fluct;
        let rhs = (-z - m - (sv - upsilon)).inv() - m;
        out.push(SelfConsistentTerms { upsilon, a, h_ii, z_fluct, vself_residual: (v[i] - rhs).norm() });
    }
    Ok(out)
}
