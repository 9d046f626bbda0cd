//! Semicircle analytics, eigendecomposition, resolvents and stability parameters.

mod eigen;
mod resolvent;
mod semicircle;
mod stability;

pub use eigen::{eigen_decompose, eigenvalues, tridiagonal_eigenvalues, Eigenvectors, SpectralData};
pub(crate) use resolvent::inverse_shifted;
pub use resolvent::{empirical_stieltjes, resolvent, resolvent_column, ResolventData, ResolventEntries, ResolventMode};
pub use semicircle::{
    classical_location, semicircle_counting, semicircle_density, semicircle_stieltjes, DensityModel, SemicircleModel,
};
pub(crate) use semicircle::stieltjes_unchecked;
pub use stability::{
    control_params, eta_thresholds, eta_thresholds_on_grid, pi_parameter, restricted_row_norm, stability_gamma,
    EtaThresholds, GammaEvaluator, Gammas, StabilityParams, ETA_GRID_MAX, ETA_GRID_MIN, ETA_GRID_RATIO,
};
