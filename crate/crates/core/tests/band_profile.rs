use rmt_core::bandlab::{empirical_t, theta_exact};
use rmt_core::ensemble::{band_profile, EntryLaw, Shape};
use rmt_core::exec::Sequential;
use rmt_core::C64;

#[test]
fn monte_carlo_error_follows_square_root_law() {
    let s = band_profile(60, 5, Shape::Uniform).unwrap();
    let z = C64::new(0.0, 0.2);
    let a = empirical_t(&Sequential, &s, &EntryLaw::gue(), z, 200, 11, None).unwrap();
    let b = empirical_t(&Sequential, &s, &EntryLaw::gue(), z, 800, 12, None).unwrap();
    let se = |p: &rmt_core::bandlab::DiffusionProfile| p.stderr.iter().sum::<f64>();
    // Four times the samples: half the error, with sampling slack on the estimate itself.
    let ratio = se(&b) / se(&a);
    assert!((ratio - 0.5).abs() < 0.08, "ratio {ratio}");
}

#[test]
fn averaged_t_tracks_theta_at_moderate_eta() {
    let (n, w) = (120, 10);
    let s = band_profile(n, w, Shape::Uniform).unwrap();
    let z = C64::new(0.0, 0.2);
    let th = theta_exact(&s, z).unwrap();
    let t = empirical_t(&Sequential, &s, &EntryLaw::gue(), z, 300, 3, None).unwrap();
    let l1 = t.relative_l1(&th).unwrap();
    assert!(l1 < 0.1, "relative L1 {l1}");
    assert!((t.mass / th.mass - 1.0).abs() < 0.05);
}

#[test]
fn real_symmetric_band_matrices_also_track_theta() {
    let (n, w) = (120, 10);
    let s = band_profile(n, w, Shape::TruncatedGaussian { cutoff: 3.0 }).unwrap();
    let z = C64::new(0.5, 0.2);
    let th = theta_exact(&s, z).unwrap();
    let t = empirical_t(&Sequential, &s, &EntryLaw::goe(), z, 300, 4, None).unwrap();
    assert!(t.relative_l1(&th).unwrap() < 0.15);
}
