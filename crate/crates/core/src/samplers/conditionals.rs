//! Log full conditionals (up to additive constants) of the non-conjugate
//! parameters and the conjugate noise-variance update.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::model::{
    log_add_exp, log_effective_variance, log_kappa_sq_from_log_a, Dataset, GuidanceVector,
    Hyperparameters, ModelState,
};

/// `log N(beta | 0, sigma^2 kappa^2)` up to a constant, with `b2s = beta^2 / sigma^2`.
#[inline]
fn gaussian_term(log_kappa_sq: f64, b2s: f64) -> f64 {
    if b2s == 0.0 {
        -0.5 * log_kappa_sq
    } else {
        -0.5 * log_kappa_sq - 0.5 * b2s * (-log_kappa_sq).exp()
    }
}

/// Half-Cauchy(0, 1) on the local scale, `-log(1 + lambda^2)`, from `log lambda`.
#[inline]
fn log_half_cauchy_unit(log_lambda: f64) -> f64 {
    -log_add_exp(0.0, 2.0 * log_lambda)
}

/// Log conditional of `u = log lambda_j`, including the Jacobian `+u`.
///
/// `eta_z` is `eta * z_j`; `log_tau_sq` and `log_c_sq` are the current globals.
#[inline]
pub(crate) fn lambda_log_density_log_scale(
    u: f64,
    b2s: f64,
    eta_z: f64,
    log_tau_sq: f64,
    log_c_sq: f64,
) -> f64 {
    let log_a = 2.0 * u + log_tau_sq + eta_z;
    gaussian_term(log_kappa_sq_from_log_a(log_a, log_c_sq), b2s) + log_half_cauchy_unit(u) + u
}

/// Log conditional of a local scale `lambda_j` given everything else.
pub fn log_cond_lambda_j(lambda_j: f64, beta_j: f64, z_j: f64, state: &ModelState) -> f64 {
    if !(lambda_j > 0.0) {
        return f64::NEG_INFINITY;
    }
    let log_k2 = log_effective_variance(z_j, lambda_j, state.tau, state.c_sq, state.eta);
    gaussian_term(log_k2, beta_j * beta_j / state.sigma_sq) - (lambda_j * lambda_j).ln_1p()
}

/// Per-coordinate quantities shared by the global-parameter conditionals.
pub(crate) struct GlobalTerms<'a> {
    b2s: Vec<f64>,
    log_lambda_sq: Vec<f64>,
    z: &'a [f64],
}

impl<'a> GlobalTerms<'a> {
    pub(crate) fn new(state: &ModelState, guidance: &'a GuidanceVector) -> Self {
        GlobalTerms {
            b2s: state
                .beta
                .iter()
                .map(|b| b * b / state.sigma_sq)
                .collect(),
            log_lambda_sq: state.lambda.iter().map(|l| 2.0 * l.ln()).collect(),
            z: guidance.values(),
        }
    }

    /// `sum_j [-1/2 log kappa_j^2 - beta_j^2 / (2 sigma^2 kappa_j^2)]`.
    pub(crate) fn log_lik(&self, log_tau_sq: f64, log_c_sq: f64, eta: f64) -> f64 {
        self.b2s
            .iter()
            .zip(&self.log_lambda_sq)
            .zip(self.z)
            .map(|((&b2s, &ll), &z)| {
                gaussian_term(log_kappa_sq_from_log_a(ll + log_tau_sq + eta * z, log_c_sq), b2s)
            })
            .sum()
    }

    /// Same sum with `log A_j = offset_j + shift` for precomputed offsets.
    pub(crate) fn log_lik_with_offsets(&self, offsets: &[f64], shift: f64, log_c_sq: f64) -> f64 {
        self.b2s
            .iter()
            .zip(offsets)
            .map(|(&b2s, &o)| gaussian_term(log_kappa_sq_from_log_a(o + shift, log_c_sq), b2s))
            .sum()
    }

    /// `2 log lambda_j + eta z_j`.
    pub(crate) fn local_offsets(&self, eta: f64) -> Vec<f64> {
        self.log_lambda_sq
            .iter()
            .zip(self.z)
            .map(|(ll, z)| ll + eta * z)
            .collect()
    }
}

pub(crate) fn log_prior_tau(tau: f64, hyper: &Hyperparameters) -> f64 {
    -(tau / hyper.tau0).powi(2).ln_1p()
}

pub(crate) fn log_prior_c_sq(c_sq: f64, hyper: &Hyperparameters) -> f64 {
    -(hyper.a_c + 1.0) * c_sq.ln() - hyper.b_c / c_sq
}

pub(crate) fn log_prior_eta(eta: f64, hyper: &Hyperparameters) -> f64 {
    if eta < 0.0 {
        f64::NEG_INFINITY
    } else {
        -eta * eta / (2.0 * hyper.sigma_eta_sq)
    }
}

/// Log conditional of the global scale `tau` (half-Cauchy(0, tau0) prior).
pub fn log_cond_tau(
    tau: f64,
    state: &ModelState,
    guidance: &GuidanceVector,
    hyper: &Hyperparameters,
) -> f64 {
    if !(tau > 0.0) {
        return f64::NEG_INFINITY;
    }
    GlobalTerms::new(state, guidance).log_lik(2.0 * tau.ln(), state.c_sq.ln(), state.eta)
        + log_prior_tau(tau, hyper)
}

/// Log conditional of the slab variance `c^2` (inverse-gamma prior).
pub fn log_cond_c_sq(
    c_sq: f64,
    state: &ModelState,
    guidance: &GuidanceVector,
    hyper: &Hyperparameters,
) -> f64 {
    if !(c_sq > 0.0) {
        return f64::NEG_INFINITY;
    }
    GlobalTerms::new(state, guidance).log_lik(2.0 * state.tau.ln(), c_sq.ln(), state.eta)
        + log_prior_c_sq(c_sq, hyper)
}

/// Log conditional of the guidance strength `eta >= 0` (half-normal prior).
pub fn log_cond_eta(
    eta: f64,
    state: &ModelState,
    guidance: &GuidanceVector,
    hyper: &Hyperparameters,
) -> f64 {
    if eta < 0.0 {
        return f64::NEG_INFINITY;
    }
    GlobalTerms::new(state, guidance).log_lik(2.0 * state.tau.ln(), state.c_sq.ln(), eta)
        + log_prior_eta(eta, hyper)
}

/// Shape and rate of the inverse-gamma full conditional of `sigma^2`.
pub fn sigma_sq_posterior(
    state: &ModelState,
    data: &Dataset,
    kappa_sq: &[f64],
    hyper: &Hyperparameters,
) -> Result<(f64, f64)> {
    let (n, p) = (data.n(), data.p());
    if state.p() != p || kappa_sq.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "state has {} coefficients, {} effective variances, data has {} predictors",
            state.p(),
            kappa_sq.len(),
            p
        )));
    }
    let beta = ndarray::ArrayView1::from(&state.beta[..]);
    let resid = data.y() - &data.x().dot(&beta);
    let rss = resid.dot(&resid);
    let penalty: f64 = state
        .beta
        .iter()
        .zip(kappa_sq)
        .filter(|(b, _)| **b != 0.0)
        .map(|(b, k)| b * b / k)
        .sum();
    let shape = hyper.a_sigma + (n + p) as f64 / 2.0;
    let rate = hyper.b_sigma + 0.5 * rss + 0.5 * penalty;
    Ok((shape, rate))
}

/// Conjugate draw of the noise variance.
pub fn update_sigma_sq<R: Rng + ?Sized>(
    state: &ModelState,
    data: &Dataset,
    kappa_sq: &[f64],
    hyper: &Hyperparameters,
    rng: &mut R,
) -> Result<f64> {
    let (shape, rate) = sigma_sq_posterior(state, data, kappa_sq, hyper)?;
    let gamma = Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::invalid("sigma_sq posterior", e.to_string()))?;
    Ok(1.0 / gamma.sample(rng))
}
