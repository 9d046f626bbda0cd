use alloc::vec::Vec;
use core::f64::consts::PI;
use faer::linalg::solvers::Solve;
use faer::Mat;
use libm::{cos, log, sqrt};

use super::potential::{Potential, PotentialKind};
use crate::spectral::{semicircle_counting, semicircle_density, DensityModel};
use crate::{quad, Error, Result};

/// Equilibrium density `ρ_V` of a single-interval convex potential.
///
/// Written as `ρ_V(x) = π⁻¹ √((B − x)(x − A)) h(x)` with `h` a polynomial;
/// for `V = x²/2` this is the semicircle and the closed forms are used.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumModel {
    a: f64,
    b: f64,
    /// Coefficients of `h`; empty for the semicircle.
    h: Vec<f64>,
}

/// `μ_m = π⁻¹ ∫_A^B t^m ((B − t)(t − A))^{−1/2} dt` for `m < count`, exact by
/// Gauss–Chebyshev quadrature.
fn chebyshev_moments(a: f64, b: f64, count: usize) -> Vec<f64> {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    let nodes = count + 2;
    let mut mu = alloc::vec![0.0; count];
    for k in 0..nodes {
        let t = c + r * cos((2 * k + 1) as f64 * PI / (2 * nodes) as f64);
        let mut p = 1.0;
        for m in mu.iter_mut() {
            *m += p;
            p *= t;
        }
    }
    mu.iter_mut().for_each(|m| *m /= nodes as f64);
    mu
}

/// Endpoint conditions `Σ p_k μ_k = 0`, `Σ p_k μ_{k+1} = 1` with `p = V′/2`.
fn endpoint_residual(p: &[f64], a: f64, b: f64) -> [f64; 2] {
    let mu = chebyshev_moments(a, b, p.len() + 1);
    let f1: f64 = p.iter().zip(&mu).map(|(x, m)| x * m).sum();
    let f2: f64 = p.iter().zip(&mu[1..]).map(|(x, m)| x * m).sum();
    [f1, f2 - 1.0]
}

fn h_coefficients(p: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mu = chebyshev_moments(a, b, p.len());
    let mut h = alloc::vec![0.0; p.len().saturating_sub(1).max(1)];
    for (k, &pk) in p.iter().enumerate() {
        for i in 0..k {
            h[i] += pk * mu[k - 1 - i];
        }
    }
    h
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

impl EquilibriumModel {
    pub fn semicircle() -> Self {
        Self { a: -2.0, b: 2.0, h: Vec::new() }
    }

    pub fn is_semicircle(&self) -> bool {
        self.h.is_empty()
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `h` such that `ρ = π⁻¹ √((B − x)(x − A)) h`.
    pub fn h_coefficients(&self) -> Vec<f64> {
        if self.h.is_empty() {
            alloc::vec![0.5]
        } else {
            self.h.clone()
        }
    }

    /// `ρ_V(γ_j)`, the local density at the `j`-th classical location.
    pub fn local_density(&self, j: usize, n: usize) -> f64 {
        self.density(self.classical_location(j, n))
    }
}

impl DensityModel for EquilibriumModel {
    fn density(&self, x: f64) -> f64 {
        if self.h.is_empty() {
            return semicircle_density(x);
        }
        if x <= self.a || x >= self.b {
            return 0.0;
        }
        sqrt((self.b - x) * (x - self.a)) * horner(&self.h, x) / PI
    }

    fn counting(&self, x: f64) -> f64 {
        if self.h.is_empty() {
            return semicircle_counting(x);
        }
        if x <= self.a {
            return 0.0;
        }
        if x >= self.b {
            return 1.0;
        }
        let (c, r) = (0.5 * (self.a + self.b), 0.5 * (self.b - self.a));
        // x = c − r cos θ turns ρ dx into a smooth integrand.
        let theta = libm::acos(((c - x) / r).clamp(-1.0, 1.0));
        let f = |t: f64| {
            let s = libm::sin(t);
            r * r * s * s * horner(&self.h, c - r * cos(t)) / PI
        };
        quad::integrate(f, 0.0, theta, 1e-14).clamp(0.0, 1.0)
    }

    fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

/// Equilibrium measure of a convex polynomial potential via the square-root
/// ansatz, with Newton iteration on the endpoints.
pub fn equilibrium_model(v: &Potential) -> Result<EquilibriumModel> {
    if v.kind() == PotentialKind::Quadratic {
        return Ok(EquilibriumModel::semicircle());
    }
    if !v.is_convex() {
        return Err(Error::invalid("equilibrium solver requires a strictly convex potential"));
    }
    let p: Vec<f64> = v.derivative_coeffs().iter().map(|c| 0.5 * c).collect();
    let (mut c, mut r) = (0.0, 2.0 / sqrt(v.inf_second()));
    let eval = |c: f64, r: f64| endpoint_residual(&p, c - r, c + r);
    let mut f = eval(c, r);
    let mut converged = false;
    for _ in 0..200 {
        if f[0].abs().max(f[1].abs()) < 1e-14 {
            converged = true;
            break;
        }
        let d = 1e-7 * r.max(1.0);
        let fc = eval(c + d, r);
        let fr = eval(c, r + d);
        let j = [[(fc[0] - f[0]) / d, (fr[0] - f[0]) / d], [(fc[1] - f[1]) / d, (fr[1] - f[1]) / d]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dc = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dr = (-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        let mut step = 1.0;
        loop {
            let (nc, nr) = (c - step * dc, r - step * dr);
            if nr > 0.0 {
                let nf = eval(nc, nr);
                if nf[0].abs().max(nf[1].abs()) < f[0].abs().max(f[1].abs()) || step < 1e-6 {
                    c = nc;
                    r = nr;
                    f = nf;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-12 {
                return Err(Error::NotConverged("endpoint Newton iteration stalled".into()));
            }
        }
    }
    if !converged && f[0].abs().max(f[1].abs()) > 1e-12 {
        return Err(Error::NotConverged("endpoint Newton iteration".into()));
    }
    let (a, b) = (c - r, c + r);
    let h = h_coefficients(&p, a, b);
    for k in 0..=200 {
        let x = a + (b - a) * k as f64 / 200.0;
        if horner(&h, x) < -1e-12 {
            return Err(Error::NotConverged("density changes sign; support is not one interval".into()));
        }
    }
    Ok(EquilibriumModel { a, b, h })
}

/// Composite five-point Gauss–Legendre rule on `[a, b]` with `panels` panels.
fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let m = a + (k as f64 + 0.5) * h;
            0.5 * h * X.iter().zip(&W).map(|(x, w)| w * f(m + 0.5 * h * x)).sum::<f64>()
        })
        .sum()
}

/// `sup |V′(t)/2 − p.v.∫ ρ(s)/(t − s) ds|` over `points` interior points.
///
/// The principal value is split as `∫ (ρ(s) − ρ(t))/(t − s) ds + ρ(t) log((t − A)/(B − t))`
/// and the regular part integrated in the angle `s = c − r cos θ`.
pub fn equilibrium_residual(model: &EquilibriumModel, v: &Potential, points: usize, margin: f64) -> f64 {
    let (a, b) = model.support();
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut worst = 0.0f64;
    for k in 0..points {
        let t = a + margin + (b - a - 2.0 * margin) * (k as f64 + 0.5) / points as f64;
        let rt = model.density(t);
        let theta_t = libm::acos((c - t) / r);
        let g = |th: f64| {
            let s = c - r * cos(th);
            (model.density(s) - rt) / (t - s) * r * libm::sin(th)
        };
        let pv = gauss_legendre(g, 0.0, theta_t, 200) + gauss_legendre(g, theta_t, PI, 200) + rt * log((t - a) / (b - t));
        worst = worst.max((0.5 * v.first(t) - pv).abs());
    }
    worst
}

/// Discretised minimiser of `I(ν) = ∫ V dν − ∬ log|t − s| dν(s) dν(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEquilibrium {
    pub lo: f64,
    pub width: f64,
    /// Cell masses.
    pub masses: Vec<f64>,
    pub multiplier: f64,
    pub energy: f64,
}

impl GridEquilibrium {
    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width
    }

    /// Outermost cells carrying mass.
    pub fn support(&self) -> (f64, f64) {
        let first = self.masses.iter().position(|&m| m > 0.0).unwrap_or(0);
        let last = self.masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        (self.lo + first as f64 * self.width, self.lo + (last + 1) as f64 * self.width)
    }

    /// `Σ_i |masses_i − ν(cell_i)|` against a density model.
    pub fn l1_to<D: DensityModel>(&self, model: &D) -> f64 {
        (0..self.masses.len())
            .map(|i| {
                let a = self.lo + i as f64 * self.width;
                (self.masses[i] - (model.counting(a + self.width) - model.counting(a))).abs()
            })
            .sum()
    }
}

/// `G` with `G″(u) = log|u|`, `G(0) = 0`.
fn g2(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        0.5 * u * u * log(u.abs()) - 0.75 * u * u
    }
}

/// Mean of `log|t − s|` over two cells of width `h` whose left ends differ by `d`.
fn cell_log_kernel(d: f64, h: f64) -> f64 {
    (g2(d + h) - 2.0 * g2(d) + g2(d - h)) / (h * h)
}

fn solve_on_box(v: &Potential, lo: f64, hi: f64, cells: usize) -> Result<GridEquilibrium> {
    let h = (hi - lo) / cells as f64;
    let centers: Vec<f64> = (0..cells).map(|i| lo + (i as f64 + 0.5) * h).collect();
    // Three-point Gauss cell averages of V.
    let gl = [-sqrt(0.6), 0.0, sqrt(0.6)];
    let gw = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let vbar: Vec<f64> =
        centers.iter().map(|&x| (0..3).map(|q| gw[q] * v.value(x + 0.5 * h * gl[q])).sum::<f64>()).collect();
    let kern: Vec<f64> = (0..cells).map(|d| cell_log_kernel(d as f64 * h, h)).collect();
    let k = |i: usize, j: usize| kern[i.abs_diff(j)];
    let mut active: Vec<bool> = alloc::vec![true; cells];
    let mut w = alloc::vec![0.0; cells];
    for _ in 0..200 {
        let idx: Vec<usize> = (0..cells).filter(|&i| active[i]).collect();
        let m = idx.len();
        if m == 0 {
            return Err(Error::NotConverged("active set emptied".into()));
        }
        // 2 K_AA w + λ 1 = V̄_A, 1ᵀ w = 1.
        let a = Mat::from_fn(m + 1, m + 1, |r, c| match (r < m, c < m) {
            (true, true) => 2.0 * k(idx[r], idx[c]),
            (true, false) | (false, true) => 1.0,
            (false, false) => 0.0,
        });
        let mut rhs = Mat::from_fn(m + 1, 1, |r, _| if r < m { vbar[idx[r]] } else { 1.0 });
        a.partial_piv_lu().solve_in_place(&mut rhs);
        w.iter_mut().for_each(|x| *x = 0.0);
        for (r, &i) in idx.iter().enumerate() {
            w[i] = rhs[(r, 0)];
        }
        let lambda = rhs[(m, 0)];
        let mut changed = false;
        for &i in &idx {
            if w[i] < 0.0 {
                active[i] = false;
                changed = true;
            }
        }
        if changed {
            continue;
        }
        // Re-admit inactive cells that violate the variational inequality.
        for i in 0..cells {
            if !active[i] {
                let field: f64 = vbar[i] - 2.0 * (0..cells).map(|j| k(i, j) * w[j]).sum::<f64>();
                if field < lambda - 1e-12 {
                    active[i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            let mut energy: f64 = w.iter().zip(&vbar).map(|(a, b)| a * b).sum();
            for i in 0..cells {
                for j in 0..cells {
                    energy -= w[i] * w[j] * k(i, j);
                }
            }
            return Ok(GridEquilibrium { lo, width: h, masses: w, multiplier: lambda, energy });
        }
    }
    Err(Error::NotConverged("active-set iteration".into()))
}

/// Active-set solution of the cell-discretised energy minimisation on `cells`
/// cells, with the box refitted once around the discovered support.
pub fn equilibrium_grid(v: &Potential, cells: usize) -> Result<GridEquilibrium> {
    if cells < 16 {
        return Err(Error::invalid("need at least 16 cells"));
    }
    let mut r = 4.0;
    let first = loop {
        let g = solve_on_box(v, -r, r, cells / 4)?;
        let (a, b) = g.support();
        if a > -r + g.width && b < r - g.width {
            break g;
        }
        r *= 2.0;
        if r > 1e4 {
            return Err(Error::NotConverged("support does not fit in the box".into()));
        }
    };
    let (a, b) = first.support();
    let pad = 2.0 * first.width;
    solve_on_box(v, a - pad, b + pad, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SemicircleModel;

    #[test]
    fn quadratic_is_semicircle() {
        let m = equilibrium_model(&Potential::quadratic()).unwrap();
        assert!(m.is_semicircle());
        assert_eq!(m.support(), (-2.0, 2.0));
        // The general machinery reproduces it too.
        let p = [0.0, 0.5];
        let r = endpoint_residual(&p, -2.0, 2.0);
        assert!(r[0].abs() < 1e-15 && r[1].abs() < 1e-14);
        assert!((h_coefficients(&p, -2.0, 2.0)[0] - 0.5).abs() < 1e-15);
        // x² potential scaled: V = x² has support [−√2, √2].
        let m = equilibrium_model(&Potential::polynomial(alloc::vec![0.0, 0.0, 1.0]).unwrap()).unwrap();
        let (a, b) = m.support();
        assert!((b - sqrt(2.0)).abs() < 1e-12 && (a + b).abs() < 1e-12);
    }

    #[test]
    fn quartic_model_is_normalised_and_solves_equation() {
        let v = Potential::quartic(1.0, 1.0).unwrap();
        let m = equilibrium_model(&v).unwrap();
        let (a, b) = m.support();
        assert!((a + b).abs() < 1e-12);
        assert!(quad::integrate(|x| m.density(x), a, b, 1e-12) > 1.0 - 1e-8);
        assert!((m.counting(b) - 1.0).abs() < 1e-12);
        assert!((m.counting(0.0) - 0.5).abs() < 1e-10);
        assert!(m.classical_location(50, 100).abs() < 1e-9);
        assert!(equilibrium_residual(&m, &v, 40, 1e-3) < 1e-3);
        // Known closed form: b² solves 3a b⁴/16 + b b²/4 = 1 with a = b = 1.
        let s = b * b;
        assert!((3.0 * s * s / 16.0 + s / 4.0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn asymmetric_potential() {
        // V = x⁴/4 + x²/2 + x: shifted left.
        let v = Potential::polynomial(alloc::vec![0.0, 1.0, 0.5, 0.0, 0.25]).unwrap();
        let m = equilibrium_model(&v).unwrap();
        let (a, b) = m.support();
        assert!(a + b < 0.0);
        assert!((m.counting(b) - 1.0).abs() < 1e-12);
        assert!(equilibrium_residual(&m, &v, 30, 1e-3) < 1e-3);
    }

    #[test]
    fn cell_kernel_diagonal() {
        let h = 0.01;
        assert!((cell_log_kernel(0.0, h) - (log(h) - 1.5)).abs() < 1e-12);
        // Far cells: mean ≈ log of the distance.
        assert!((cell_log_kernel(1.0, h) - log(1.0)).abs() < 1e-4);
    }

    #[test]
    fn grid_minimiser_agrees_with_ansatz() {
        let g = equilibrium_grid(&Potential::quadratic(), 256).unwrap();
        assert!(g.l1_to(&SemicircleModel) < 0.02, "{}", g.l1_to(&SemicircleModel));
        let v = Potential::quartic(1.0, 1.0).unwrap();
        let m = equilibrium_model(&v).unwrap();
        let g = equilibrium_grid(&v, 256).unwrap();
        assert!(g.l1_to(&m) < 0.02, "{}", g.l1_to(&m));
        let (a, b) = g.support();
        assert!((a - m.support().0).abs() < 0.05 && (b - m.support().1).abs() < 0.05);
        assert!((g.masses.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}
