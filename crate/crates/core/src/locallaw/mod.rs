//! Exact resolvent identities and Monte Carlo checks of the local semicircle law.

mod checks;
mod experiments;
mod identities;

pub use checks::*;
pub use experiments::*;
pub use identities::{
    check_resolvent_identities, check_ward, self_consistent_residual, IdentityReport, MinorResolvent,
    SelfConsistentTerms,
};
