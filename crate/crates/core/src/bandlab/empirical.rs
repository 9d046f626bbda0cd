use alloc::vec::Vec;
use libm::sqrt;

use super::theory::{DiffusionProfile, ProfileMethod};
use crate::ensemble::{sample_matrix, EntryLaw, VarianceProfile};
use crate::exec::{task_seed, Executor};
use crate::spectral::resolvent_column;
use crate::{Error, Result, C64};

/// Monte Carlo average of `T_xy = Σ_i s_xi |G_iy(z)|²` as a function of `x − y`.
///
/// One resolvent column per sample, at the anchor `y` (default `N/2`).
pub fn empirical_t<E: Executor>(
    exec: &E,
    profile: &VarianceProfile,
    law: &EntryLaw,
    z: C64,
    samples: usize,
    seed: u64,
    anchor: Option<usize>,
) -> Result<DiffusionProfile> {
    let n = profile.dim();
    let y = anchor.unwrap_or(n / 2);
    if y >= n {
        return Err(Error::invalid("anchor outside the matrix"));
    }
    if samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    let rows: Vec<Result<Vec<f64>>> = exec.map(samples, |k| {
        let h = sample_matrix(profile, law, task_seed(seed, k));
        let g = resolvent_column(&h, z, y)?;
        let g2: Vec<f64> = g.iter().map(|v| v.norm_sqr()).collect();
        // Indexed by the offset x − y on the torus.
        Ok((0..n)
            .map(|d| {
                let x = (y + d) % n;
                profile.row(x).iter().zip(&g2).map(|(s, a)| s * a).sum()
            })
            .collect())
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let cnt = samples as f64;
    let mut theta = alloc::vec![0.0; n];
    let mut sq = alloc::vec![0.0; n];
    for r in &rows {
        for d in 0..n {
            theta[d] += r[d] / cnt;
            sq[d] += r[d] * r[d] / cnt;
        }
    }
    let stderr = if samples > 1 {
        (0..n).map(|d| sqrt((sq[d] - theta[d] * theta[d]).max(0.0) * cnt / (cnt - 1.0) / cnt)).collect()
    } else {
        alloc::vec![f64::NAN; n]
    };
    let mass = theta.iter().sum();
    Ok(DiffusionProfile {
        z,
        theta,
        s_hat: Vec::new(),
        theta_hat: Vec::new(),
        constant_mode: 0.0,
        mass,
        stderr,
        method: ProfileMethod::Empirical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{band_profile, flat_profile, Shape};
    use crate::exec::Sequential;

    #[test]
    fn flat_case_is_ward_identity() {
        let p = flat_profile(60).unwrap();
        let z = C64::new(0.3, 0.05);
        let t = empirical_t(&Sequential, &p, &EntryLaw::gue(), z, 1, 4, None).unwrap();
        assert!(t.flatness() < 1.0 + 1e-10);
        let h = sample_matrix(&p, &EntryLaw::gue(), task_seed(4, 0));
        let g = resolvent_column(&h, z, 30).unwrap();
        assert!((t.theta[0] - g[30].im / (60.0 * 0.05)).abs() < 1e-10);
    }

    #[test]
    fn anchor_choice_is_immaterial_on_average() {
        let p = band_profile(80, 6, Shape::Uniform).unwrap();
        let z = C64::new(0.0, 0.3);
        let a = empirical_t(&Sequential, &p, &EntryLaw::gue(), z, 200, 1, Some(0)).unwrap();
        let b = empirical_t(&Sequential, &p, &EntryLaw::gue(), z, 200, 1, Some(40)).unwrap();
        for d in 0..80 {
            let se = sqrt(a.stderr[d] * a.stderr[d] + b.stderr[d] * b.stderr[d]);
            assert!((a.theta[d] - b.theta[d]).abs() < 5.0 * se + 1e-12, "d={d}");
        }
    }
}
