//! Variance profiles, entry laws and Hermitian matrix samples.

mod law;
mod profile;
mod sample;

pub use law::{four_moment_law, Atom, DiagonalRule, EntryLaw, Family, SymmetryClass};
pub use profile::{band_profile, flat_profile, torus_distance, ProfileKind, ProfileSpec, Shape, VarianceProfile};
pub use sample::{sample_matrix, MatrixSample};
