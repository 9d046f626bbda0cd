//! Numerical laboratory for random-matrix universality.
//!
//! The crate covers the computable content of the local semicircle law and
//! its consequences:
//!
//! - [`ensemble`]: variance profiles (flat, band), entry laws, Hermitian samples.
//! - [`spectral`]: semicircle analytics, eigendecomposition, resolvents and the
//!   stability/control parameters of the self-consistent equation.
//! - [`locallaw`]: exact resolvent identities and per-sample local-law statistics.
//! - [`dbm`]: matrix Ornstein–Uhlenbeck flow and the Dyson eigenvalue SDE.
//! - [`loggas`]: β-ensembles, equilibrium measures, Metropolis samplers for the
//!   global and the locally conditioned log-gas.
//! - [`gapstats`]: unfolding, Wigner surmise, sine kernel, distribution distances.
//! - [`bandlab`]: diffusion profile of random band matrices.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Everything is deterministic given its explicit seed.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bandlab;
pub mod dbm;
pub mod exec;
pub mod ensemble;
mod error;
pub mod gapstats;
pub mod locallaw;
pub mod loggas;
pub mod quad;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};

/// Complex double, shared with the linear-algebra backend.
pub type C64 = num_complex::Complex<f64>;
