//! Domain types of the guided shrinkage model, the guidance-statistic
//! pipeline and the guided effective-variance map.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Column and response moments used to move between raw and standardized scales.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub col_means: Vec<f64>,
    pub col_sds: Vec<f64>,
    pub y_mean: f64,
    pub y_sd: f64,
}

impl Standardization {
    /// The identity transform for `p` columns.
    pub fn identity(p: usize) -> Self {
        Standardization {
            col_means: vec![0.0; p],
            col_sds: vec![1.0; p],
            y_mean: 0.0,
            y_sd: 1.0,
        }
    }

    pub fn p(&self) -> usize {
        self.col_means.len()
    }
}

/// Design matrix and response. Once standardized, every column of `x` and
/// `y` has sample mean 0 and sample sd 1.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: Array2<f64>,
    y: Array1<f64>,
    stats: Standardization,
    standardized: bool,
}

impl Dataset {
    /// Wraps raw data without transforming it.
    pub fn new_raw(x: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        validate_shape(&x, &y)?;
        let p = x.ncols();
        Ok(Dataset {
            x,
            y,
            stats: Standardization::identity(p),
            standardized: false,
        })
    }

    pub(crate) fn from_standardized(x: Array2<f64>, y: Array1<f64>, stats: Standardization) -> Self {
        debug_assert_eq!(stats.p(), x.ncols());
        Dataset {
            x,
            y,
            stats,
            standardized: true,
        }
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn stats(&self) -> &Standardization {
        &self.stats
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn require_standardized(&self) -> Result<()> {
        if self.standardized {
            Ok(())
        } else {
            Err(Error::Unstandardized)
        }
    }

    pub fn into_parts(self) -> (Array2<f64>, Array1<f64>, Standardization) {
        (self.x, self.y, self.stats)
    }
}

pub(crate) fn validate_shape(x: &Array2<f64>, y: &Array1<f64>) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows but response has {} entries",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() < 2 {
        return Err(Error::invalid("n", "at least two observations are required"));
    }
    if x.ncols() < 1 {
        return Err(Error::invalid("p", "at least one predictor is required"));
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteInput("design matrix"));
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteInput("response"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceConfig {
    /// Added to each score before taking logs.
    pub epsilon: f64,
    /// Symmetric clipping bound for the standardized log-scores.
    pub clip_bound: f64,
}

impl GuidanceConfig {
    pub fn new(epsilon: f64, clip_bound: f64) -> Result<Self> {
        let cfg = GuidanceConfig {
            epsilon,
            clip_bound,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", "must be positive and finite"));
        }
        if !(self.clip_bound > 0.0 && self.clip_bound.is_finite()) {
            return Err(Error::invalid("clip_bound", "must be positive and finite"));
        }
        Ok(())
    }
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        GuidanceConfig {
            epsilon: 1e-8,
            clip_bound: 3.0,
        }
    }
}

/// Clipped, standardized log-scores, one per predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceVector {
    z_star: Vec<f64>,
    config: GuidanceConfig,
}

impl GuidanceVector {
    pub fn new(z_star: Vec<f64>, config: GuidanceConfig) -> Result<Self> {
        config.validate()?;
        if let Some(j) = z_star
            .iter()
            .position(|z| !z.is_finite() || z.abs() > config.clip_bound)
        {
            return Err(Error::invalid(
                "z_star",
                format!(
                    "entry {} = {} is non-finite or exceeds the clip bound {}",
                    j, z_star[j], config.clip_bound
                ),
            ));
        }
        Ok(GuidanceVector { z_star, config })
    }

    /// All-zero guidance: the model reduces to the regularized horseshoe.
    pub fn uninformative(p: usize, config: GuidanceConfig) -> Self {
        GuidanceVector {
            z_star: vec![0.0; p],
            config,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.z_star
    }

    pub fn config(&self) -> &GuidanceConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.z_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_star.is_empty()
    }
}

/// Prior hyperparameters.
///
/// `tau0` is the half-Cauchy scale of the global scale, `(a_c, b_c)` the
/// inverse-gamma shape/rate of the slab `c^2`, `sigma_eta_sq` the half-normal
/// variance of the guidance strength and `(a_sigma, b_sigma)` the
/// inverse-gamma shape/rate of the noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub tau0: f64,
    pub a_c: f64,
    pub b_c: f64,
    pub sigma_eta_sq: f64,
    pub a_sigma: f64,
    pub b_sigma: f64,
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tau0", self.tau0),
            ("a_c", self.a_c),
            ("b_c", self.b_c),
            ("sigma_eta_sq", self.sigma_eta_sq),
            ("a_sigma", self.a_sigma),
            ("b_sigma", self.b_sigma),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::invalid(name, "must be positive and finite"));
            }
        }
        Ok(())
    }
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            tau0: 1.0,
            a_c: 2.0,
            b_c: 8.0,
            sigma_eta_sq: 1.0,
            a_sigma: 1.0,
            b_sigma: 1.0,
        }
    }
}

/// One state of the Markov chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub beta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub tau: f64,
    pub c_sq: f64,
    pub eta: f64,
    pub sigma_sq: f64,
}

impl ModelState {
    /// Neutral starting point: no signal, unit local scales.
    pub fn initial(p: usize, fix_eta_zero: bool) -> Self {
        ModelState {
            beta: vec![0.0; p],
            lambda: vec![1.0; p],
            tau: 0.1,
            c_sq: 4.0,
            eta: if fix_eta_zero { 0.0 } else { 0.1 },
            sigma_sq: 1.0,
        }
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    /// Name of the first component violating its support, if any.
    pub fn invalid_component(&self) -> Option<&'static str> {
        if !self.beta.iter().all(|b| b.is_finite()) {
            return Some("beta");
        }
        if !self.lambda.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Some("lambda");
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Some("tau");
        }
        if !(self.c_sq.is_finite() && self.c_sq > 0.0) {
            return Some("c_sq");
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Some("eta");
        }
        if !(self.sigma_sq.is_finite() && self.sigma_sq > 0.0) {
            return Some("sigma_sq");
        }
        None
    }

    /// Effective prior variances for every coordinate.
    pub fn effective_variances(&self, guidance: &GuidanceVector) -> Vec<f64> {
        self.lambda
            .iter()
            .zip(guidance.values())
            .map(|(&l, &z)| effective_variance(z, l, self.tau, self.c_sq, self.eta))
            .collect()
    }
}

/// Marginal association scores `|x_j' y| / n` of a standardized dataset.
pub fn guidance_scores(data: &Dataset) -> Result<Vec<f64>> {
    data.require_standardized()?;
    let n = data.n() as f64;
    Ok(data
        .x()
        .t()
        .dot(data.y())
        .iter()
        .map(|v| v.abs() / n)
        .collect())
}

/// Below this the log-scores are treated as constant and guidance is switched off.
const DEGENERATE_SD: f64 = 1e-12;

/// Log-transforms, standardizes and clips marginal scores.
pub fn guidance_statistics(scores: &[f64], config: GuidanceConfig) -> Result<GuidanceVector> {
    config.validate()?;
    if scores.len() < 2 {
        return Err(Error::invalid("scores", "need at least two scores"));
    }
    if let Some(j) = scores.iter().position(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::invalid(
            "scores",
            format!("score {} = {} is negative or non-finite", j, scores[j]),
        ));
    }
    let logs: Vec<f64> = scores.iter().map(|s| (s + config.epsilon).ln()).collect();
    let p = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / p;
    let var = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (p - 1.0);
    let sd = var.sqrt();
    if sd < DEGENERATE_SD {
        return Ok(GuidanceVector::uninformative(scores.len(), config));
    }
    let c = config.clip_bound;
    let z = logs.iter().map(|l| ((l - mean) / sd).clamp(-c, c)).collect();
    GuidanceVector::new(z, config)
}

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Log of the guided effective variance given `log A = log(tau^2 lambda^2 exp(eta z))`.
#[inline]
pub(crate) fn log_kappa_sq_from_log_a(log_a: f64, log_c_sq: f64) -> f64 {
    // log c^2 - log(1 + c^2/A); never exceeds log c^2
    log_c_sq - log_add_exp(0.0, log_c_sq - log_a)
}

/// Natural log of [`effective_variance`].
#[inline]
pub fn log_effective_variance(z: f64, lambda: f64, tau: f64, c_sq: f64, eta: f64) -> f64 {
    let log_a = 2.0 * tau.ln() + 2.0 * lambda.ln() + eta * z;
    log_kappa_sq_from_log_a(log_a, c_sq.ln())
}

/// Guided effective variance `c^2 A / (c^2 + A)` with `A = tau^2 lambda^2 exp(eta z)`.
///
/// Evaluated in the log domain so extreme scales do not overflow. The result
/// lies in `(0, c^2]`, reaching `c^2` only when `A / c^2` exceeds double precision.
#[inline]
pub fn effective_variance(z: f64, lambda: f64, tau: f64, c_sq: f64, eta: f64) -> f64 {
    let log_a = 2.0 * tau.ln() + 2.0 * lambda.ln() + eta * z;
    let d = c_sq.ln() - log_a;
    if d < 30.0 {
        c_sq / (1.0 + d.exp())
    } else {
        log_kappa_sq_from_log_a(log_a, c_sq.ln()).exp()
    }
}
