use alloc::string::String;
use alloc::vec::Vec;
use libm::{fabs, pow, sqrt};
use rand::Rng;

use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    RealSymmetric,
    ComplexHermitian,
}

impl SymmetryClass {
    /// Dyson index of the class.
    pub fn beta(self) -> f64 {
        match self {
            SymmetryClass::RealSymmetric => 1.0,
            SymmetryClass::ComplexHermitian => 2.0,
        }
    }
}

/// How the diagonal variance is derived from the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalRule {
    /// `E h_ii² = s_ii`.
    Profile,
    /// Invariant Gaussian normalization: `E h_ii² = 2 s_ii` for real symmetric
    /// matrices (GOE), `s_ii` for complex Hermitian ones (GUE).
    Invariant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Distribution of the standardized variable `ζ` (mean 0, variance 1).
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Gaussian,
    /// ±1 with probability 1/2 each.
    Bernoulli,
    /// Uniform on `[-√3, √3]`.
    Uniform,
    /// Finitely supported law.
    Discrete(Vec<Atom>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryLaw {
    family: Family,
    class: SymmetryClass,
    diagonal: DiagonalRule,
    /// Cumulative probabilities for discrete sampling.
    cumulative: Vec<f64>,
}

const MOMENT_TOL: f64 = 1e-12;

impl EntryLaw {
    pub fn new(family: Family, class: SymmetryClass) -> Result<Self> {
        let cumulative = match &family {
            Family::Discrete(atoms) => validate_atoms(atoms)?,
            _ => Vec::new(),
        };
        Ok(Self { family, class, diagonal: DiagonalRule::Profile, cumulative })
    }

    pub fn gaussian(class: SymmetryClass) -> Self {
        Self { family: Family::Gaussian, class, diagonal: DiagonalRule::Profile, cumulative: Vec::new() }
    }

    pub fn bernoulli(class: SymmetryClass) -> Self {
        Self { family: Family::Bernoulli, class, diagonal: DiagonalRule::Profile, cumulative: Vec::new() }
    }

    pub fn uniform(class: SymmetryClass) -> Self {
        Self { family: Family::Uniform, class, diagonal: DiagonalRule::Profile, cumulative: Vec::new() }
    }

    /// Gaussian Orthogonal Ensemble entries (diagonal variance `2 s_ii`).
    pub fn goe() -> Self {
        Self::gaussian(SymmetryClass::RealSymmetric).with_diagonal(DiagonalRule::Invariant)
    }

    /// Gaussian Unitary Ensemble entries.
    pub fn gue() -> Self {
        Self::gaussian(SymmetryClass::ComplexHermitian).with_diagonal(DiagonalRule::Invariant)
    }

    pub fn with_diagonal(mut self, rule: DiagonalRule) -> Self {
        self.diagonal = rule;
        self
    }

    pub fn with_class(mut self, class: SymmetryClass) -> Self {
        self.class = class;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn diagonal_rule(&self) -> DiagonalRule {
        self.diagonal
    }

    /// Variance multiplier applied to `s_ii` on the diagonal.
    pub fn diagonal_factor(&self) -> f64 {
        match (self.diagonal, self.class) {
            (DiagonalRule::Invariant, SymmetryClass::RealSymmetric) => 2.0,
            _ => 1.0,
        }
    }

    /// Standardized moments `[m1, m2, m3, m4]` of `ζ`.
    pub fn moments(&self) -> [f64; 4] {
        match &self.family {
            Family::Gaussian => [0.0, 1.0, 0.0, 3.0],
            Family::Bernoulli => [0.0, 1.0, 0.0, 1.0],
            Family::Uniform => [0.0, 1.0, 0.0, 1.8],
            Family::Discrete(atoms) => {
                let mut m = [0.0; 4];
                for a in atoms {
                    for (k, mk) in m.iter_mut().enumerate() {
                        *mk += a.prob * pow(a.value, (k + 1) as f64);
                    }
                }
                m
            }
        }
    }

    pub fn tag(&self) -> String {
        let fam = match &self.family {
            Family::Gaussian => "gaussian".into(),
            Family::Bernoulli => "bernoulli".into(),
            Family::Uniform => "uniform".into(),
            Family::Discrete(atoms) => alloc::format!("discrete({})", atoms.len()),
        };
        let class = match self.class {
            SymmetryClass::RealSymmetric => "real",
            SymmetryClass::ComplexHermitian => "complex",
        };
        let diag = match self.diagonal {
            DiagonalRule::Profile => "",
            DiagonalRule::Invariant => ",invariant",
        };
        alloc::format!("{fam}/{class}{diag}")
    }

    /// Draw one standardized variable.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.family {
            Family::Gaussian => rng::normal(rng),
            Family::Bernoulli => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Family::Uniform => sqrt(3.0) * (2.0 * rng::uniform(rng) - 1.0),
            Family::Discrete(atoms) => {
                let u = rng::uniform(rng);
                let k = self.cumulative.partition_point(|&c| c <= u).min(atoms.len() - 1);
                atoms[k].value
            }
        }
    }
}

fn validate_atoms(atoms: &[Atom]) -> Result<Vec<f64>> {
    if atoms.is_empty() || atoms.iter().any(|a| !(a.prob >= 0.0) || !a.value.is_finite()) {
        return Err(Error::invalid("discrete law needs finite atoms with nonnegative weights"));
    }
    let total: f64 = atoms.iter().map(|a| a.prob).sum();
    if fabs(total - 1.0) > MOMENT_TOL {
        return Err(Error::invalid(alloc::format!("atom weights sum to {total}")));
    }
    let m1: f64 = atoms.iter().map(|a| a.prob * a.value).sum();
    let m2: f64 = atoms.iter().map(|a| a.prob * a.value * a.value).sum();
    if fabs(m1) > MOMENT_TOL || fabs(m2 - 1.0) > MOMENT_TOL {
        return Err(Error::invalid(alloc::format!("law is not standardized (m1={m1}, m2={m2})")));
    }
    let mut acc = 0.0;
    Ok(atoms
        .iter()
        .map(|a| {
            acc += a.prob;
            acc
        })
        .collect())
}

/// Finitely supported standardized law with prescribed third and fourth moments.
///
/// Uses atoms `{u, 0, v}` with `u < 0 < v`; the zero atom vanishes on the
/// boundary `m4 = 1 + m3²`, where the law is two-point.
pub fn four_moment_law(m3: f64, m4: f64, class: SymmetryClass) -> Result<EntryLaw> {
    if !m3.is_finite() || !m4.is_finite() || m4 < 1.0 + m3 * m3 - MOMENT_TOL {
        return Err(Error::InfeasibleMoments { m3, m4 });
    }
    // Tilted measure q_x = p_x x² has mean m3 and variance m4 − m3² on {u, v};
    // the original law must have mean zero, which fixes the split.
    let sigma = sqrt((m4 - m3 * m3).max(0.0));
    let disc = sqrt(m3 * m3 + 4.0 * sigma * sigma);
    let u = 0.5 * (m3 - disc);
    let v = 0.5 * (m3 + disc);
    // p_u u + p_v v = 0 and p_u u² + p_v v² = 1.
    let p_v = 1.0 / (v * (v - u));
    let p_u = 1.0 / (-u * (v - u));
    let p_0 = 1.0 - p_u - p_v;
    let mut atoms = Vec::new();
    if p_u > 0.0 {
        atoms.push(Atom { value: u, prob: p_u });
    }
    if p_0 > MOMENT_TOL {
        atoms.push(Atom { value: 0.0, prob: p_0 });
    }
    if p_v > 0.0 {
        atoms.push(Atom { value: v, prob: p_v });
    }
    // Fold the rounding remainder into the largest atom so weights sum to one.
    let total: f64 = atoms.iter().map(|a| a.prob).sum();
    if let Some(a) = atoms.iter_mut().max_by(|a, b| a.prob.total_cmp(&b.prob)) {
        a.prob += 1.0 - total;
    }
    EntryLaw::new(Family::Discrete(atoms), class)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_moments(atoms: &[Atom]) -> [f64; 4] {
        let mut m = [0.0; 4];
        for a in atoms {
            m[0] += a.prob * a.value;
            m[1] += a.prob * a.value * a.value;
            m[2] += a.prob * a.value * a.value * a.value;
            m[3] += a.prob * a.value * a.value * a.value * a.value;
        }
        m
    }

    #[test]
    fn three_point_law_for_gaussian_moments() {
        let law = four_moment_law(0.0, 3.0, SymmetryClass::RealSymmetric).unwrap();
        let Family::Discrete(atoms) = law.family() else { panic!("expected discrete") };
        assert_eq!(atoms.len(), 3);
        let s3 = sqrt(3.0);
        assert!((atoms[0].value + s3).abs() < 1e-12 && (atoms[0].prob - 1.0 / 6.0).abs() < 1e-12);
        assert!(atoms[1].value == 0.0 && (atoms[1].prob - 2.0 / 3.0).abs() < 1e-12);
        assert!((atoms[2].value - s3).abs() < 1e-12 && (atoms[2].prob - 1.0 / 6.0).abs() < 1e-12);
        let m = direct_moments(atoms);
        for (got, want) in m.iter().zip([0.0, 1.0, 0.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn bernoulli_boundary_case() {
        let law = four_moment_law(0.0, 1.0, SymmetryClass::RealSymmetric).unwrap();
        let Family::Discrete(atoms) = law.family() else { panic!("expected discrete") };
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].value + 1.0).abs() < 1e-12 && (atoms[1].value - 1.0).abs() < 1e-12);
        assert!((atoms[0].prob - 0.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_moments() {
        assert!(matches!(
            four_moment_law(0.0, 0.5, SymmetryClass::RealSymmetric),
            Err(Error::InfeasibleMoments { .. })
        ));
        assert!(four_moment_law(1.0, 1.5, SymmetryClass::RealSymmetric).is_err());
    }

    #[test]
    fn skewed_law_hits_requested_moments() {
        for &(m3, m4) in &[(0.5, 2.0), (-1.2, 4.0), (2.0, 5.0), (0.3, 1.09)] {
            let law = four_moment_law(m3, m4, SymmetryClass::RealSymmetric).unwrap();
            let Family::Discrete(atoms) = law.family() else { panic!() };
            let m = direct_moments(atoms);
            assert!(m[0].abs() < 1e-12, "{m:?}");
            assert!((m[1] - 1.0).abs() < 1e-12, "{m:?}");
            assert!((m[2] - m3).abs() < 1e-12, "{m:?}");
            assert!((m[3] - m4).abs() < 1e-12, "{m:?}");
            assert_eq!(law.moments().map(|x| (x * 1e9).round()), m.map(|x| (x * 1e9).round()));
        }
    }

    #[test]
    fn recorded_moments_satisfy_feasibility() {
        for law in [
            EntryLaw::goe(),
            EntryLaw::bernoulli(SymmetryClass::RealSymmetric),
            EntryLaw::uniform(SymmetryClass::ComplexHermitian),
        ] {
            let m = law.moments();
            assert_eq!(m[0], 0.0);
            assert_eq!(m[1], 1.0);
            assert!(m[3] >= m[1] * m[1]);
        }
    }
}
