use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Quadratic,
    Quartic,
    Polynomial,
}

/// Polynomial external potential `V(x) = Σ c_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    coeffs: Vec<f64>,
    kind: PotentialKind,
    inf_second: f64,
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
    }
    c
}

/// `inf_x p(x)` for a polynomial; `−∞` if unbounded below.
fn polynomial_infimum(p: &[f64]) -> f64 {
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return p.first().copied().unwrap_or(0.0);
    }
    let lead = p[deg];
    if deg % 2 == 1 || lead < 0.0 {
        return f64::NEG_INFINITY;
    }
    // Cauchy bound on the critical points.
    let dp = derivative(p);
    let dl = dp[dp.len() - 1];
    let r = 1.0 + dp[..dp.len() - 1].iter().map(|a| (a / dl).abs()).fold(0.0, f64::max);
    let m = 4000;
    let h = 2.0 * r / m as f64;
    let mut best = f64::INFINITY;
    for k in 0..=m {
        let x = -r + k as f64 * h;
        let v = horner(p, x);
        if v < best {
            best = v;
        }
        // Refine sign changes of p′ by bisection.
        let (a, b) = (x, x + h);
        if k < m && horner(&dp, a) <= 0.0 && horner(&dp, b) >= 0.0 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if horner(&dp, mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.min(horner(p, 0.5 * (lo + hi)));
        }
    }
    best
}

impl Potential {
    /// `x²/2`.
    pub fn quadratic() -> Self {
        Self { coeffs: alloc::vec![0.0, 0.0, 0.5], kind: PotentialKind::Quadratic, inf_second: 1.0 }
    }

    /// `a x⁴/4 + b x²/2`.
    pub fn quartic(a: f64, b: f64) -> Result<Self> {
        let mut p = Self::polynomial(alloc::vec![0.0, 0.0, 0.5 * b, 0.0, 0.25 * a])?;
        p.kind = PotentialKind::Quartic;
        Ok(p)
    }

    /// `Σ c_k x^k` from the coefficient list `c_0, c_1, …`.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        let coeffs = trim(coeffs);
        if coeffs.len() < 3 {
            return Err(Error::invalid("potential must have degree at least 2"));
        }
        let second = derivative(&derivative(&coeffs));
        let inf_second = polynomial_infimum(&second);
        let kind = if coeffs.len() == 3 && coeffs[0] == 0.0 && coeffs[1] == 0.0 && coeffs[2] == 0.5 {
            PotentialKind::Quadratic
        } else {
            PotentialKind::Polynomial
        };
        Ok(Self { coeffs, kind, inf_second })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    pub fn first(&self, x: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &a)| acc * x + k as f64 * a)
    }

    pub fn second(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(0.0, |acc, (k, &a)| acc * x + (k * (k - 1)) as f64 * a)
    }

    /// Coefficients of `V′`.
    pub fn derivative_coeffs(&self) -> Vec<f64> {
        derivative(&self.coeffs)
    }

    /// `inf_x V″(x)`.
    pub fn inf_second(&self) -> f64 {
        self.inf_second
    }

    pub fn is_convex(&self) -> bool {
        self.inf_second > 0.0
    }

    pub fn tag(&self) -> String {
        match self.kind {
            PotentialKind::Quadratic => "quadratic".into(),
            PotentialKind::Quartic => alloc::format!("quartic({},{})", 4.0 * self.coeffs[4], 2.0 * self.coeffs[2]),
            PotentialKind::Polynomial => alloc::format!("poly{:?}", self.coeffs),
        }
    }
}

/// `N` particles at inverse temperature `β` in the potential `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSpec {
    pub n: usize,
    pub beta: f64,
    pub potential: Potential,
}

impl BetaSpec {
    pub fn new(n: usize, beta: f64, potential: Potential) -> Result<Self> {
        if n == 0 || !(beta > 0.0) {
            return Err(Error::invalid("need N ≥ 1 and β > 0"));
        }
        Ok(Self { n, beta, potential })
    }

    pub fn gaussian(n: usize, beta: f64) -> Result<Self> {
        Self::new(n, beta, Potential::quadratic())
    }

    /// `ℋ(λ) = Σ V(λ_k)/2 − N⁻¹ Σ_{i<j} log(λ_j − λ_i)`.
    pub fn hamiltonian(&self, lambda: &[f64]) -> f64 {
        let n = self.n as f64;
        let mut h: f64 = lambda.iter().map(|&x| 0.5 * self.potential.value(x)).sum();
        for j in 0..lambda.len() {
            for i in 0..j {
                h -= libm::log((lambda[j] - lambda[i]).abs()) / n;
            }
        }
        h
    }
}
