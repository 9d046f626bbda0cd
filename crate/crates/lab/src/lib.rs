//! Runner for the `rmt-core` experiments: configuration files, a thread-pool
//! executor, CSV/JSON output and the acceptance suite.

pub mod acceptance;
pub mod catalog;
pub mod config;
pub mod output;
pub mod parallel;

pub use catalog::{catalog, find, run_experiment, CatalogEntry};
pub use config::{ConfigError, ExperimentConfig};
pub use parallel::Parallel;
