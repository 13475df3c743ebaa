//! Univariate slice sampling, the full-conditional updates and the MCMC loop.

mod conditionals;
mod mcmc;
mod slice;

pub use conditionals::{
    log_cond_c_sq, log_cond_eta, log_cond_lambda_j, log_cond_tau, sigma_sq_posterior,
    update_sigma_sq,
};
pub use mcmc::{
    run_mcmc, run_sampler, BetaStorage, ChainStore, IterationView, McmcConfig, SamplerOutput,
    StageTimings,
};
pub use slice::{slice_sample, slice_sample_bounded, SliceConfig};
