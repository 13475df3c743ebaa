//! Guided regularized-horseshoe regression.
//!
//! Marginal association scores are turned into bounded guidance statistics
//! that modulate each coefficient's shrinkage inside the regularized
//! horseshoe variance map. Posterior inference runs either the full
//! Gibbs/slice sampler ([`samplers::run_mcmc`]) or the active-set
//! approximation for very wide designs ([`active::run_mcmc_active`]).

pub mod active;
pub mod analysis;
pub mod data;
pub mod error;
pub mod linalg;
pub mod model;
pub mod samplers;

pub use error::{Error, Result};
