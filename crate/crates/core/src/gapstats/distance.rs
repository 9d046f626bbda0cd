use alloc::vec::Vec;
use libm::sqrt;
use rand::Rng;

use super::reference::Reference;
use crate::{rng, stats, Error, Result};

pub const DEFAULT_BINS: usize = 40;
pub const DEFAULT_RESAMPLES: usize = 200;

/// Distances between an empirical sample and a reference (or a second sample).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub ks: f64,
    /// Binned `∫|f̂ − f|`.
    pub l1: f64,
    pub mean_delta: f64,
    pub variance_delta: f64,
    pub samples: usize,
    /// Half-width of the central 95% bootstrap interval of `ks`.
    pub ks_radius: f64,
    pub l1_radius: f64,
}

fn binned_l1<R: Reference + ?Sized>(sorted: &[f64], reference: &R, edges: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let mut l1 = 0.0;
    for w in edges.windows(2) {
        let count = (sorted.partition_point(|&x| x < w[1]) - sorted.partition_point(|&x| x < w[0])) as f64;
        l1 += (count / n - (reference.cdf(w[1]) - reference.cdf(w[0]))).abs();
    }
    // Mass outside the binned window counts fully.
    let lo = sorted.partition_point(|&x| x < edges[0]) as f64;
    let hi = (sorted.len() - sorted.partition_point(|&x| x < edges[edges.len() - 1])) as f64;
    l1 + (lo / n - reference.cdf(edges[0])).abs() + (hi / n - (1.0 - reference.cdf(edges[edges.len() - 1]))).abs()
}

fn ks_sorted<R: Reference + ?Sized>(sorted: &[f64], reference: &R) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = reference.cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

fn edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|b| lo + (hi - lo) * b as f64 / bins as f64).collect()
}

fn radius(mut xs: Vec<f64>) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    0.5 * (stats::quantile_sorted(&xs, 0.975) - stats::quantile_sorted(&xs, 0.025))
}

fn resample<R: Rng>(xs: &[f64], r: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..xs.len()).map(|_| xs[r.random_range(0..xs.len())]).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// KS, binned L1 and moment differences of `sample` against `reference`, with
/// bootstrap radii from `resamples` resamples.
pub fn distribution_distance<R: Reference + ?Sized>(
    sample: &[f64],
    reference: &R,
    bins: usize,
    resamples: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    if sample.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    if bins == 0 {
        return Err(Error::invalid("at least one bin is required"));
    }
    let sorted = stats::sorted(sample);
    let (lo, hi) = reference.window();
    let e = edges(lo, hi, bins);
    let ks = ks_sorted(&sorted, reference);
    let l1 = binned_l1(&sorted, reference, &e);
    let mut r = rng::stream(seed, 0);
    let (mut kb, mut lb) = (Vec::with_capacity(resamples), Vec::with_capacity(resamples));
    for _ in 0..resamples {
        let b = resample(&sorted, &mut r);
        kb.push(ks_sorted(&b, reference));
        lb.push(binned_l1(&b, reference, &e));
    }
    Ok(ComparisonReport {
        ks,
        l1,
        mean_delta: stats::mean(sample) - reference.mean(),
        variance_delta: if sample.len() > 1 { stats::variance(sample) - reference.variance() } else { f64::NAN },
        samples: sample.len(),
        ks_radius: radius(kb),
        l1_radius: radius(lb),
    })
}

fn two_sample_l1(a: &[f64], b: &[f64], e: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let count = |s: &[f64], lo: f64, hi: f64| (s.partition_point(|&x| x < hi) - s.partition_point(|&x| x < lo)) as f64;
    let mut l1 = 0.0;
    for w in e.windows(2) {
        l1 += (count(a, w[0], w[1]) / na - count(b, w[0], w[1]) / nb).abs();
    }
    l1
}

/// Two-sample version; `ks`, `l1` and the moment deltas (up to sign) are symmetric in `a`, `b`.
pub fn distribution_distance_two_sample(
    a: &[f64],
    b: &[f64],
    bins: usize,
    resamples: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    let (sa, sb) = (stats::sorted(a), stats::sorted(b));
    let lo = sa[0].min(sb[0]);
    let hi = sa[sa.len() - 1].max(sb[sb.len() - 1]);
    let e = edges(lo, hi + 1e-12 * (1.0 + hi.abs()), bins.max(1));
    let ks = stats::ks_two_sample(&sa, &sb);
    let l1 = two_sample_l1(&sa, &sb, &e);
    let mut r = rng::stream(seed, 0);
    let (mut kb, mut lb) = (Vec::with_capacity(resamples), Vec::with_capacity(resamples));
    for _ in 0..resamples {
        let (ra, rb) = (resample(&sa, &mut r), resample(&sb, &mut r));
        kb.push(stats::ks_two_sample(&ra, &rb));
        lb.push(two_sample_l1(&ra, &rb, &e));
    }
    Ok(ComparisonReport {
        ks,
        l1,
        mean_delta: stats::mean(a) - stats::mean(b),
        variance_delta: if a.len() > 1 && b.len() > 1 { stats::variance(a) - stats::variance(b) } else { f64::NAN },
        samples: a.len().min(b.len()),
        ks_radius: radius(kb),
        l1_radius: radius(lb),
    })
}

/// One histogram bin with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistBin {
    pub center: f64,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Density histogram of `sample` on `[lo, hi]`.
pub fn histogram(sample: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<HistBin> {
    let n = sample.len().max(1) as f64;
    let w = (hi - lo) / bins as f64;
    let mut counts = alloc::vec![0usize; bins];
    for &x in sample {
        if x >= lo && x < hi {
            counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
        }
    }
    counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let p = c as f64 / n;
            let se = sqrt(p * (1.0 - p) / n);
            HistBin { center: lo + (b as f64 + 0.5) * w, value: p / w, ci_low: (p - 1.96 * se).max(0.0) / w, ci_high: (p + 1.96 * se) / w }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gapstats::{surmise_cdf, Exponential, Surmise};
    use crate::quad;
    use libm::exp;

    fn surmise_draws(n: usize, seed: u64) -> Vec<f64> {
        let mut r = rng::stream(seed, 0);
        (0..n).map(|_| Surmise.quantile(rng::uniform(&mut r))).collect()
    }

    #[test]
    fn self_test_is_close() {
        let s = surmise_draws(10_000, 1);
        let rep = distribution_distance(&s, &Surmise, DEFAULT_BINS, DEFAULT_RESAMPLES, 2).unwrap();
        assert!(rep.ks < 0.02, "{rep:?}");
        assert!(rep.mean_delta.abs() < 0.03);
    }

    #[test]
    fn exponential_is_far_from_surmise() {
        // Oracle: the sup of |e^{−πs²/4} − e^{−s}| by dense evaluation.
        let oracle = (0..100_000).map(|k| k as f64 * 1e-4).map(|s| (exp(-s) - (1.0 - surmise_cdf(s))).abs()).fold(0.0, f64::max);
        assert!((oracle - 0.2155).abs() < 5e-4, "{oracle}");
        let mut r = rng::stream(3, 0);
        let e: Vec<f64> = (0..10_000).map(|_| Exponential.quantile(rng::uniform(&mut r))).collect();
        let rep = distribution_distance(&e, &Surmise, DEFAULT_BINS, 50, 4).unwrap();
        assert!(rep.ks > 0.2);
        assert!((rep.ks - oracle).abs() < 0.02);
    }

    #[test]
    fn bootstrap_radius_shrinks_like_root_n() {
        let small = distribution_distance(&surmise_draws(2_000, 5), &Surmise, DEFAULT_BINS, DEFAULT_RESAMPLES, 6).unwrap();
        let large = distribution_distance(&surmise_draws(32_000, 7), &Surmise, DEFAULT_BINS, DEFAULT_RESAMPLES, 8).unwrap();
        let ratio = small.ks_radius / large.ks_radius;
        assert!(ratio > 2.5 && ratio < 6.5, "{ratio}");
    }

    #[test]
    fn two_sample_symmetry() {
        let a = surmise_draws(3000, 11);
        let b: Vec<f64> = surmise_draws(2000, 12).iter().map(|x| x * 1.1).collect();
        let ab = distribution_distance_two_sample(&a, &b, 30, 20, 1).unwrap();
        let ba = distribution_distance_two_sample(&b, &a, 30, 20, 1).unwrap();
        assert_eq!(ab.ks, ba.ks);
        assert!((ab.l1 - ba.l1).abs() < 1e-15);
        assert!((ab.mean_delta + ba.mean_delta).abs() < 1e-15);
    }

    #[test]
    fn histogram_integrates_to_one() {
        let s = surmise_draws(5000, 13);
        let h = histogram(&s, 0.0, 6.0, 30);
        let total: f64 = h.iter().map(|b| b.value * 0.2).sum();
        assert!((total - 1.0).abs() < 1e-3);
        let exact = quad::integrate(|x| Surmise.pdf(x), 0.0, 0.2, 1e-12) / 0.2;
        assert!((h[0].value - exact).abs() < 4.0 * (h[0].ci_high - h[0].value));
    }
}
