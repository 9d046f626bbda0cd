//! β-ensembles: equilibrium measures, exact and Metropolis samplers, local conditioned measures.

mod conditional;
mod equilibrium;
mod experiments;
mod mcmc;
mod potential;
mod tridiag;

pub use equilibrium::{equilibrium_grid, equilibrium_model, equilibrium_residual, EquilibriumModel, GridEquilibrium};
pub use mcmc::{
    equilibrium_start, mcmc_sample, metropolis_accept_prob, run_chain, run_pool, Chain, ChainPool, GasTarget,
    McmcConfig, MetropolisChain, TARGET_ACCEPTANCE,
};
pub use potential::{BetaSpec, Potential, PotentialKind};
pub use tridiag::tridiagonal_sample;
pub use conditional::{good_set_check, ConditionalSpec, GoodSetReport, CONVEXITY_CONSTANT};
pub use experiments::{
    centred_window, classical_configuration, cross_validation_experiment, gap_universality_experiment,
    good_boundary_draws, level_repulsion_experiment, local_gap_experiment, local_rigidity_experiment, ChainSettings,
    GapUniversalityConfig, LocalGapConfig, LocalRigidityConfig, LocalSide, RepulsionConfig, XvalConfig,
};
pub use conditional::conditional_sample;
