//! Diffusion profile of random band matrices.
//!
//! For a circulant variance profile the local averages `T_xy = Σ_i s_xi |G_iy|²`
//! are close to `Θ = |m|²S(1 − |m|²S)⁻¹`, a discrete diffusion kernel whose
//! shape moves from a peak of width `W/√η` to a flat profile once `η < (W/N)²`.

mod empirical;
mod experiments;
mod theory;

pub use empirical::empirical_t;
pub use experiments::{band_experiment, figure1_report, BandConfig, Figure1Config};
pub use theory::{alpha, theta_exact, theta_fourier_approx, DiffusionProfile, ProfileMethod};
