//! Dyson Brownian motion: the matrix Ornstein–Uhlenbeck flow and the eigenvalue SDE.

mod experiment;
mod flow;
mod sde;

pub use experiment::{
    relaxation_experiment, sde_consistency_experiment, sde_flow_gaps, RelaxationConfig, INVARIANCE_CONSTANT,
};
pub use flow::{entrywise_ou, matrix_ou_flow};
pub use sde::{dbm_integrate, default_dt, drift, FlowConfig, ParticleState, Scheme, MAX_HALVINGS};
