use std::time::{Duration, Instant};

use ndarray::{Array2, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::conditionals::{
    lambda_log_density_log_scale, log_prior_c_sq, log_prior_eta, log_prior_tau, update_sigma_sq,
    GlobalTerms,
};
use super::slice::{slice_sample, slice_sample_bounded, SliceConfig};
use crate::active::{ActiveSetBuilder, ActiveSetConfig};
use crate::error::{Error, Result};
use crate::linalg::sample_beta;
use crate::model::{Dataset, GuidanceVector, Hyperparameters, ModelState};

/// Which coefficient columns a chain keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaStorage {
    /// Every coordinate, every kept draw.
    #[default]
    All,
    /// Only coordinates that were active at some kept draw (plus the guidance
    /// budget). A coordinate outside the active set at a given draw is
    /// recorded as 0; by construction its magnitude was at most the
    /// coefficient threshold unless the active-set cap evicted it.
    /// Ignored by the full sampler.
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcConfig {
    pub n_iter: usize,
    pub n_burnin: usize,
    pub thin: usize,
    pub seed: u64,
    pub slice: SliceConfig,
    /// Pins the guidance strength at 0 (regularized horseshoe baseline).
    pub fix_eta_zero: bool,
    pub beta_storage: BetaStorage,
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_iter <= self.n_burnin {
            return Err(Error::invalid(
                "n_iter",
                format!("must exceed n_burnin ({} <= {})", self.n_iter, self.n_burnin),
            ));
        }
        if self.thin < 1 {
            return Err(Error::invalid("thin", "must be at least 1"));
        }
        self.slice.validate()
    }

    /// Number of draws kept after burn-in and thinning.
    pub fn kept_draws(&self) -> usize {
        (self.n_iter - self.n_burnin).div_ceil(self.thin)
    }

    fn keeps(&self, iteration: usize) -> bool {
        iteration >= self.n_burnin && (iteration - self.n_burnin).is_multiple_of(self.thin)
    }
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            n_iter: 5000,
            n_burnin: 1000,
            thin: 1,
            seed: 0,
            slice: SliceConfig::default(),
            fix_eta_zero: false,
            beta_storage: BetaStorage::All,
        }
    }
}

/// Thinned post-burn-in draws of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStore {
    pub p: usize,
    /// Sweep index of each kept draw.
    pub iterations: Vec<usize>,
    /// Coordinates (0-based) that `beta_draws` columns refer to, ascending.
    pub beta_index: Vec<usize>,
    pub beta_draws: Array2<f64>,
    pub tau_draws: Vec<f64>,
    pub c_sq_draws: Vec<f64>,
    pub eta_draws: Vec<f64>,
    pub sigma_sq_draws: Vec<f64>,
    pub lambda_final: Vec<f64>,
    /// Active-set size at every sweep; empty for the full sampler.
    pub active_sizes: Vec<usize>,
}

impl ChainStore {
    pub fn n_kept(&self) -> usize {
        self.iterations.len()
    }

    /// Draws of coordinate `j`, if stored.
    pub fn beta_column(&self, j: usize) -> Option<ArrayView1<'_, f64>> {
        self.beta_index
            .binary_search(&j)
            .ok()
            .map(|c| self.beta_draws.column(c))
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.n_kept();
        let consistent = self.beta_draws.nrows() == k
            && self.beta_draws.ncols() == self.beta_index.len()
            && self.tau_draws.len() == k
            && self.c_sq_draws.len() == k
            && self.eta_draws.len() == k
            && self.sigma_sq_draws.len() == k
            && self.beta_index.windows(2).all(|w| w[0] < w[1])
            && self.beta_index.last().is_none_or(|&j| j < self.p);
        if !consistent {
            return Err(Error::DimensionMismatch("inconsistent chain store".into()));
        }
        let finite = self.beta_draws.iter().all(|v| v.is_finite())
            && [&self.tau_draws, &self.c_sq_draws, &self.eta_draws, &self.sigma_sq_draws]
                .iter()
                .all(|v| v.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::NonFiniteInput("chain store"));
        }
        Ok(())
    }

    /// Pools several chains into one store. Coefficient columns are the union
    /// of the chains' stored coordinates; missing entries are 0.
    pub fn pool(chains: &[ChainStore]) -> Result<ChainStore> {
        let first = chains
            .first()
            .ok_or_else(|| Error::invalid("chains", "nothing to pool"))?;
        if chains.iter().any(|c| c.p != first.p) {
            return Err(Error::DimensionMismatch("chains disagree on p".into()));
        }
        let mut index: Vec<usize> = chains.iter().flat_map(|c| c.beta_index.iter().copied()).collect();
        index.sort_unstable();
        index.dedup();
        let rows: usize = chains.iter().map(|c| c.n_kept()).sum();
        let mut beta = Array2::zeros((rows, index.len()));
        let mut offset = 0;
        for c in chains {
            for (src_col, &j) in c.beta_index.iter().enumerate() {
                let dst_col = index.binary_search(&j).expect("index is a union");
                beta.column_mut(dst_col)
                    .slice_mut(ndarray::s![offset..offset + c.n_kept()])
                    .assign(&c.beta_draws.column(src_col));
            }
            offset += c.n_kept();
        }
        let cat = |f: fn(&ChainStore) -> &Vec<f64>| -> Vec<f64> {
            chains.iter().flat_map(|c| f(c).iter().copied()).collect()
        };
        Ok(ChainStore {
            p: first.p,
            iterations: chains.iter().flat_map(|c| c.iterations.iter().copied()).collect(),
            beta_index: index,
            beta_draws: beta,
            tau_draws: cat(|c| &c.tau_draws),
            c_sq_draws: cat(|c| &c.c_sq_draws),
            eta_draws: cat(|c| &c.eta_draws),
            sigma_sq_draws: cat(|c| &c.sigma_sq_draws),
            lambda_final: first.lambda_final.clone(),
            active_sizes: chains.iter().flat_map(|c| c.active_sizes.iter().copied()).collect(),
        })
    }
}

/// Wall time spent in each stage of the sweep, summed over iterations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub beta: Duration,
    pub sigma_sq: Duration,
    /// Local-scale updates, including active-set construction.
    pub lambda: Duration,
    pub globals: Duration,
    pub iterations: usize,
}

impl StageTimings {
    pub fn lambda_per_iteration(&self) -> Duration {
        self.lambda / self.iterations.max(1) as u32
    }

    pub fn total(&self) -> Duration {
        self.beta + self.sigma_sq + self.lambda + self.globals
    }
}

/// State handed to an observer after every sweep.
pub struct IterationView<'a> {
    pub iteration: usize,
    pub state: &'a ModelState,
    /// Active set used for this sweep's local-scale updates (active sampler only).
    pub active_set: Option<&'a [usize]>,
    pub kept: bool,
    /// Stage times accumulated up to and including this sweep.
    pub timings: &'a StageTimings,
}

pub struct SamplerOutput {
    pub store: ChainStore,
    pub timings: StageTimings,
}

/// Full sampler: every sweep updates `beta, sigma^2, lambda_1..p, tau, c^2, eta`.
pub fn run_mcmc(
    data: &Dataset,
    guidance: &GuidanceVector,
    hyper: &Hyperparameters,
    cfg: &McmcConfig,
) -> Result<ChainStore> {
    Ok(run_sampler(data, guidance, hyper, cfg, None, |_| {})?.store)
}

/// Runs the full sampler (`active = None`) or the active-set sampler, calling
/// `observer` after every sweep.
pub fn run_sampler<F>(
    data: &Dataset,
    guidance: &GuidanceVector,
    hyper: &Hyperparameters,
    cfg: &McmcConfig,
    active: Option<&ActiveSetConfig>,
    mut observer: F,
) -> Result<SamplerOutput>
where
    F: FnMut(&IterationView<'_>),
{
    data.require_standardized()?;
    cfg.validate()?;
    hyper.validate()?;
    let p = data.p();
    if guidance.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "guidance has {} entries for {} predictors",
            guidance.len(),
            p
        )));
    }
    let builder = active
        .map(|a| ActiveSetBuilder::new(guidance, a))
        .transpose()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = ModelState::initial(p, cfg.fix_eta_zero);
    let mut recorder = Recorder::new(p, cfg, builder.as_ref());
    let mut timings = StageTimings::default();
    let mut local = LocalScales::new(p);
    let mut active_sizes = Vec::new();

    for iteration in 0..cfg.n_iter {
        let abort = |parameter| Error::NonFiniteState {
            iteration,
            parameter,
        };

        let t = Instant::now();
        let kappa_sq = state.effective_variances(guidance);
        if kappa_sq.iter().any(|k| !k.is_finite()) {
            return Err(abort("kappa_sq"));
        }
        let beta = sample_beta(data, &kappa_sq, state.sigma_sq, &mut rng).map_err(|e| match e {
            Error::NotPositiveDefinite { .. } => abort("beta"),
            other => other,
        })?;
        state.beta = beta.to_vec();
        timings.beta += t.elapsed();

        let t = Instant::now();
        state.sigma_sq = update_sigma_sq(&state, data, &kappa_sq, hyper, &mut rng)?;
        timings.sigma_sq += t.elapsed();

        let t = Instant::now();
        let active_set = match (&builder, active) {
            (Some(b), Some(a)) => {
                let set = b.build(&state.beta);
                local.reset_inactive(&mut state, &set, a.lambda_baseline);
                active_sizes.push(set.len());
                Some(set)
            }
            _ => None,
        };
        match &active_set {
            Some(set) => local.update(&mut state, guidance, set.iter().copied(), &cfg.slice, &mut rng),
            None => local.update(&mut state, guidance, 0..p, &cfg.slice, &mut rng),
        }
        .map_err(|_| abort("lambda"))?;
        timings.lambda += t.elapsed();

        let t = Instant::now();
        update_globals(&mut state, guidance, hyper, cfg, &mut rng, iteration)?;
        timings.globals += t.elapsed();
        timings.iterations += 1;

        if let Some(name) = state.invalid_component() {
            return Err(abort(name));
        }
        let kept = cfg.keeps(iteration);
        if kept {
            recorder.record(iteration, &state, active_set.as_deref());
        }
        observer(&IterationView {
            iteration,
            state: &state,
            active_set: active_set.as_deref(),
            kept,
            timings: &timings,
        });
    }

    let mut store = recorder.finish(state.lambda);
    store.active_sizes = active_sizes;
    Ok(SamplerOutput { store, timings })
}

/// Local-scale slice updates on `log lambda_j`, plus baseline resets for the
/// active sampler.
struct LocalScales {
    in_active: Vec<bool>,
    previous: Vec<usize>,
    initialized: bool,
}

impl LocalScales {
    fn new(p: usize) -> Self {
        LocalScales {
            in_active: vec![false; p],
            previous: Vec::new(),
            initialized: false,
        }
    }

    /// Pins `lambda_j` to the baseline for every coordinate outside `set`.
    /// After the first sweep only the previous active set needs touching.
    fn reset_inactive(&mut self, state: &mut ModelState, set: &[usize], baseline: f64) {
        for &j in &self.previous {
            self.in_active[j] = false;
        }
        for &j in set {
            self.in_active[j] = true;
        }
        if self.initialized {
            for &j in &self.previous {
                if !self.in_active[j] {
                    state.lambda[j] = baseline;
                }
            }
        } else {
            for (l, &on) in state.lambda.iter_mut().zip(&self.in_active) {
                if !on {
                    *l = baseline;
                }
            }
            self.initialized = true;
        }
        self.previous.clear();
        self.previous.extend_from_slice(set);
    }

    fn update<I, R>(
        &mut self,
        state: &mut ModelState,
        guidance: &GuidanceVector,
        indices: I,
        slice: &SliceConfig,
        rng: &mut R,
    ) -> Result<()>
    where
        I: Iterator<Item = usize>,
        R: rand::Rng + ?Sized,
    {
        let log_tau_sq = 2.0 * state.tau.ln();
        let log_c_sq = state.c_sq.ln();
        let z = guidance.values();
        for j in indices {
            let b2s = state.beta[j] * state.beta[j] / state.sigma_sq;
            let eta_z = state.eta * z[j];
            let u0 = state.lambda[j].ln();
            let u = slice_sample(
                |u| lambda_log_density_log_scale(u, b2s, eta_z, log_tau_sq, log_c_sq),
                u0,
                slice,
                rng,
            )?;
            state.lambda[j] = u.exp();
        }
        Ok(())
    }
}

fn update_globals<R: rand::Rng + ?Sized>(
    state: &mut ModelState,
    guidance: &GuidanceVector,
    hyper: &Hyperparameters,
    cfg: &McmcConfig,
    rng: &mut R,
    iteration: usize,
) -> Result<()> {
    let abort = |parameter| Error::NonFiniteState {
        iteration,
        parameter,
    };
    let terms = GlobalTerms::new(state, guidance);

    // tau on the log scale
    let offsets = terms.local_offsets(state.eta);
    let log_c_sq = state.c_sq.ln();
    let v = slice_sample(
        |v| {
            terms.log_lik_with_offsets(&offsets, 2.0 * v, log_c_sq)
                + log_prior_tau(v.exp(), hyper)
                + v
        },
        state.tau.ln(),
        &cfg.slice,
        rng,
    )
    .map_err(|_| abort("tau"))?;
    state.tau = v.exp();

    // c^2 on the log scale
    let log_tau_sq = 2.0 * state.tau.ln();
    let w = slice_sample(
        |w| {
            terms.log_lik_with_offsets(&offsets, log_tau_sq, w)
                + log_prior_c_sq(w.exp(), hyper)
                + w
        },
        state.c_sq.ln(),
        &cfg.slice,
        rng,
    )
    .map_err(|_| abort("c_sq"))?;
    state.c_sq = w.exp();

    // eta on [0, inf)
    if cfg.fix_eta_zero {
        state.eta = 0.0;
    } else {
        let log_c_sq = state.c_sq.ln();
        state.eta = slice_sample_bounded(
            |eta| terms.log_lik(log_tau_sq, log_c_sq, eta) + log_prior_eta(eta, hyper),
            state.eta,
            0.0,
            &cfg.slice,
            rng,
        )
        .map_err(|_| abort("eta"))?;
    }
    Ok(())
}

struct Recorder {
    p: usize,
    storage: BetaStorage,
    iterations: Vec<usize>,
    dense_rows: Vec<f64>,
    sparse_rows: Vec<Vec<(usize, f64)>>,
    guidance_set: Vec<usize>,
    tau: Vec<f64>,
    c_sq: Vec<f64>,
    eta: Vec<f64>,
    sigma_sq: Vec<f64>,
}

impl Recorder {
    fn new(p: usize, cfg: &McmcConfig, builder: Option<&ActiveSetBuilder>) -> Self {
        let storage = match builder {
            Some(_) => cfg.beta_storage,
            None => BetaStorage::All,
        };
        let kept = cfg.kept_draws();
        Recorder {
            p,
            storage,
            iterations: Vec::with_capacity(kept),
            dense_rows: Vec::with_capacity(if storage == BetaStorage::All { kept * p } else { 0 }),
            sparse_rows: Vec::new(),
            guidance_set: builder.map(|b| b.guidance_indices().to_vec()).unwrap_or_default(),
            tau: Vec::with_capacity(kept),
            c_sq: Vec::with_capacity(kept),
            eta: Vec::with_capacity(kept),
            sigma_sq: Vec::with_capacity(kept),
        }
    }

    fn record(&mut self, iteration: usize, state: &ModelState, active_set: Option<&[usize]>) {
        self.iterations.push(iteration);
        match (self.storage, active_set) {
            (BetaStorage::Active, Some(set)) => self
                .sparse_rows
                .push(set.iter().map(|&j| (j, state.beta[j])).collect()),
            _ => self.dense_rows.extend_from_slice(&state.beta),
        }
        self.tau.push(state.tau);
        self.c_sq.push(state.c_sq);
        self.eta.push(state.eta);
        self.sigma_sq.push(state.sigma_sq);
    }

    fn finish(self, lambda_final: Vec<f64>) -> ChainStore {
        let kept = self.iterations.len();
        let (beta_index, beta_draws) = if self.storage == BetaStorage::Active {
            let mut index = self.guidance_set.clone();
            index.extend(self.sparse_rows.iter().flat_map(|r| r.iter().map(|(j, _)| *j)));
            index.sort_unstable();
            index.dedup();
            let mut draws = Array2::zeros((kept, index.len()));
            for (row, entries) in self.sparse_rows.iter().enumerate() {
                for &(j, v) in entries {
                    let col = index.binary_search(&j).expect("index covers entries");
                    draws[[row, col]] = v;
                }
            }
            (index, draws)
        } else {
            let draws = Array2::from_shape_vec((kept, self.p), self.dense_rows)
                .expect("one row per kept draw");
            ((0..self.p).collect(), draws)
        };
        ChainStore {
            p: self.p,
            iterations: self.iterations,
            beta_index,
            beta_draws,
            tau_draws: self.tau,
            c_sq_draws: self.c_sq,
            eta_draws: self.eta,
            sigma_sq_draws: self.sigma_sq,
            lambda_final,
            active_sizes: Vec::new(),
        }
    }
}
