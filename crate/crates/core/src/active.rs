//! Active-set approximation for ultra-high dimensions: local scales are only
//! updated for a per-sweep subset of coordinates, the rest are pinned to a
//! small baseline.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{Dataset, GuidanceVector, Hyperparameters, ModelState};
use crate::samplers::{run_sampler, ChainStore, McmcConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveSetConfig {
    /// Number of top-|z| predictors that are always active.
    pub guidance_budget: usize,
    /// Coordinates with `|beta_j|` above this join the active set.
    pub coef_threshold: f64,
    /// Upper bound on the active-set size; 0 means no cap.
    pub max_active: usize,
    /// Local scale assigned to inactive coordinates.
    pub lambda_baseline: f64,
}

impl ActiveSetConfig {
    /// `max(50, ceil(0.05 p))` capped at `10^4` (and at `p`).
    pub fn default_budget(p: usize) -> usize {
        let five_percent = (p as f64 * 0.05).ceil() as usize;
        five_percent.clamp(50, 10_000).min(p)
    }

    pub fn for_dimension(p: usize) -> Self {
        ActiveSetConfig {
            guidance_budget: Self::default_budget(p),
            coef_threshold: 1e-4,
            max_active: 0,
            lambda_baseline: 1e-3,
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.guidance_budget > p {
            return Err(Error::invalid(
                "guidance_budget",
                format!("{} exceeds the number of predictors {}", self.guidance_budget, p),
            ));
        }
        if !(self.coef_threshold > 0.0 && self.coef_threshold.is_finite()) {
            return Err(Error::invalid("coef_threshold", "must be positive and finite"));
        }
        if !(self.lambda_baseline > 0.0 && self.lambda_baseline.is_finite()) {
            return Err(Error::invalid("lambda_baseline", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Indices of the `k` largest `|z|`, ties broken by ascending index, sorted ascending.
fn top_guidance(z: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    let by_strength = |a: &usize, b: &usize| {
        z[*b].abs()
            .partial_cmp(&z[*a].abs())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(b))
    };
    if k > 0 && k < order.len() {
        order.select_nth_unstable_by(k - 1, by_strength);
    }
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Builds active sets against a fixed guidance vector; the guidance ranking
/// is computed once.
#[derive(Debug, Clone)]
pub struct ActiveSetBuilder {
    guided: Vec<usize>,
    is_guided: Vec<bool>,
    cfg: ActiveSetConfig,
}

impl ActiveSetBuilder {
    pub fn new(guidance: &GuidanceVector, cfg: &ActiveSetConfig) -> Result<Self> {
        let p = guidance.len();
        cfg.validate(p)?;
        let guided = top_guidance(guidance.values(), cfg.guidance_budget);
        let mut is_guided = vec![false; p];
        for &j in &guided {
            is_guided[j] = true;
        }
        Ok(ActiveSetBuilder {
            guided,
            is_guided,
            cfg: *cfg,
        })
    }

    /// The guidance-budget members, ascending.
    pub fn guidance_indices(&self) -> &[usize] {
        &self.guided
    }

    /// Guidance budget union threshold crossers, optionally capped; ascending.
    pub fn build(&self, beta: &[f64]) -> Vec<usize> {
        let t = self.cfg.coef_threshold;
        let set: Vec<usize> = beta
            .iter()
            .zip(&self.is_guided)
            .enumerate()
            .filter(|(_, (b, &g))| g || b.abs() > t)
            .map(|(j, _)| j)
            .collect();
        let cap = self.cfg.max_active;
        if cap == 0 || set.len() <= cap {
            return set;
        }
        let mut others: Vec<usize> = set.into_iter().filter(|&j| !self.is_guided[j]).collect();
        others.sort_by(|&a, &b| {
            beta[b]
                .abs()
                .partial_cmp(&beta[a].abs())
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        others.truncate(cap.saturating_sub(self.guided.len()));
        others.extend_from_slice(&self.guided);
        others.sort_unstable();
        others
    }
}

/// Active set for a single state; see [`ActiveSetBuilder`].
pub fn build_active_set(
    state: &ModelState,
    guidance: &GuidanceVector,
    cfg: &ActiveSetConfig,
) -> Result<Vec<usize>> {
    if state.p() != guidance.len() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} coefficients, guidance has {} entries",
            state.p(),
            guidance.len()
        )));
    }
    Ok(ActiveSetBuilder::new(guidance, cfg)?.build(&state.beta))
}

/// Active-set sampler. Identical to the full sweep except that the active
/// set is rebuilt after the `beta` and `sigma^2` updates, only its members
/// get local-scale updates, and every other `lambda_j` is set to the baseline.
pub fn run_mcmc_active(
    data: &Dataset,
    guidance: &GuidanceVector,
    hyper: &Hyperparameters,
    mcmc_cfg: &McmcConfig,
    active_cfg: &ActiveSetConfig,
) -> Result<ChainStore> {
    Ok(run_sampler(data, guidance, hyper, mcmc_cfg, Some(active_cfg), |_| {})?.store)
}
