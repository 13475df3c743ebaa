//! Standardization, synthetic benchmark scenarios and file formats.

mod io;

pub use io::{
    read_chains, read_dataset, read_report, read_table, write_chains, write_report, write_table,
    ResponseColumn, Table,
};

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{validate_shape, Dataset, Standardization};

const MIN_SD: f64 = 1e-12;

/// Nonzero coefficients placed in the first ten coordinates of every scenario.
pub const SCENARIO_COEFFICIENTS: [f64; 10] = [2.5, -2.0, 1.8, -1.5, 1.2, 1.0, -0.9, 0.8, 0.7, -0.7];

/// Ground truth of a synthetic dataset, on the raw (pre-standardization) scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTruth {
    pub beta0: Vec<f64>,
    /// 0-based indices of the nonzero entries of `beta0`.
    pub support: Vec<usize>,
    pub sigma_noise: f64,
    pub rho: f64,
}

impl SyntheticTruth {
    pub fn from_coefficients(beta0: Vec<f64>, sigma_noise: f64, rho: f64) -> Self {
        let support = beta0
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect();
        SyntheticTruth {
            beta0,
            support,
            sigma_noise,
            rho,
        }
    }

    /// Coefficients expressed on the standardized scale of `stats`:
    /// `beta0_j * sd(x_j) / sd(y)`.
    pub fn standardized_beta(&self, stats: &Standardization) -> Vec<f64> {
        self.beta0
            .iter()
            .zip(&stats.col_sds)
            .map(|(b, sd)| b * sd / stats.y_sd)
            .collect()
    }
}

/// Centers and scales every column of `x` and the response to sample mean 0
/// and sample sd 1 (n - 1 denominator). Consumes the inputs and works in place.
pub fn standardize(mut x: Array2<f64>, mut y: Array1<f64>) -> Result<Dataset> {
    validate_shape(&x, &y)?;
    let (n, p) = x.dim();
    let nf = n as f64;

    let mut means = vec![0.0; p];
    for row in x.axis_iter(Axis(0)) {
        for (m, v) in means.iter_mut().zip(row.iter()) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= nf);
    let mut sums = vec![0.0; p];
    for row in x.axis_iter(Axis(0)) {
        for ((s, v), m) in sums.iter_mut().zip(row.iter()).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    let sds: Vec<f64> = sums.iter().map(|s| (s / (nf - 1.0)).sqrt()).collect();
    if let Some(j) = sds.iter().position(|&sd| !(sd > MIN_SD)) {
        return Err(Error::ConstantColumn(j));
    }
    for mut row in x.axis_iter_mut(Axis(0)) {
        for ((v, m), sd) in row.iter_mut().zip(&means).zip(&sds) {
            *v = (*v - m) / sd;
        }
    }

    let y_mean = y.sum() / nf;
    let y_sd = (y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    if !(y_sd > MIN_SD) {
        return Err(Error::invalid("response", "response is constant"));
    }
    y.mapv_inplace(|v| (v - y_mean) / y_sd);

    Ok(Dataset::from_standardized(
        x,
        y,
        Standardization {
            col_means: means,
            col_sds: sds,
            y_mean,
            y_sd,
        },
    ))
}

/// Applies training statistics to new raw rows.
pub fn apply_standardization(x_raw: &Array2<f64>, stats: &Standardization) -> Result<Array2<f64>> {
    if x_raw.ncols() != stats.p() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} predictor columns, found {}",
            stats.p(),
            x_raw.ncols()
        )));
    }
    let mut out = x_raw.clone();
    for mut row in out.axis_iter_mut(Axis(0)) {
        for ((v, m), sd) in row.iter_mut().zip(&stats.col_means).zip(&stats.col_sds) {
            *v = (*v - m) / sd;
        }
    }
    Ok(out)
}

/// Maps a standardized dataset back to its raw scale.
pub fn unstandardize(data: &Dataset) -> (Array2<f64>, Array1<f64>) {
    let stats = data.stats();
    let mut x = data.x().clone();
    for mut row in x.axis_iter_mut(Axis(0)) {
        for ((v, m), sd) in row.iter_mut().zip(&stats.col_means).zip(&stats.col_sds) {
            *v = *v * sd + m;
        }
    }
    let y = data.y().mapv(|v| v * stats.y_sd + stats.y_mean);
    (x, y)
}

/// Raw design, response and truth of a synthetic scenario.
///
/// Rows are AR(1) sequences `x_1 ~ N(0,1)`, `x_j = rho x_{j-1} + sqrt(1-rho^2) e_j`,
/// so columns have Toeplitz correlation `rho^|i-j|` (`rho = 0`: independent
/// design). `y = X beta0 + e` with unit noise.
pub fn generate_scenario_raw(
    n: usize,
    p: usize,
    rho: f64,
    seed: u64,
) -> Result<(Array2<f64>, Array1<f64>, SyntheticTruth)> {
    if p < SCENARIO_COEFFICIENTS.len() {
        return Err(Error::invalid(
            "p",
            format!("need at least {} predictors, got {}", SCENARIO_COEFFICIENTS.len(), p),
        ));
    }
    if n < 2 {
        return Err(Error::invalid("n", "need at least two observations"));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::invalid("rho", format!("must lie in [0, 1), got {rho}")));
    }
    let sigma = 1.0;
    let mut beta0 = vec![0.0; p];
    beta0[..SCENARIO_COEFFICIENTS.len()].copy_from_slice(&SCENARIO_COEFFICIENTS);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let innovation_sd = (1.0 - rho * rho).sqrt();
    let mut x = Array2::<f64>::zeros((n, p));
    let mut y = Array1::<f64>::zeros(n);
    for (mut row, yi) in x.axis_iter_mut(Axis(0)).zip(y.iter_mut()) {
        let row = row.as_slice_mut().expect("standard layout");
        let mut prev: f64 = rng.sample(StandardNormal);
        row[0] = prev;
        for v in row[1..].iter_mut() {
            let e: f64 = rng.sample(StandardNormal);
            prev = rho * prev + innovation_sd * e;
            *v = prev;
        }
        let signal: f64 = row
            .iter()
            .zip(&SCENARIO_COEFFICIENTS)
            .map(|(a, b)| a * b)
            .sum();
        *yi = signal + sigma * rng.sample::<f64, _>(StandardNormal);
    }
    Ok((x, y, SyntheticTruth::from_coefficients(beta0, sigma, rho)))
}

/// Standardized synthetic scenario. `rho = 0` is the independent design,
/// `rho > 0` the Toeplitz-correlated one.
pub fn generate_scenario(n: usize, p: usize, rho: f64, seed: u64) -> Result<(Dataset, SyntheticTruth)> {
    let (x, y, truth) = generate_scenario_raw(n, p, rho, seed)?;
    Ok((standardize(x, y)?, truth))
}

/// A training set standardized on its own statistics and the untouched raw
/// held-out rows.
#[derive(Debug, Clone)]
pub struct TrainTestSplit {
    pub train: Dataset,
    pub test_x: Array2<f64>,
    pub test_y: Array1<f64>,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

/// Random split; preprocessing is fitted on the training rows only.
pub fn train_test_split(
    x: &Array2<f64>,
    y: &Array1<f64>,
    test_fraction: f64,
    seed: u64,
) -> Result<TrainTestSplit> {
    validate_shape(x, y)?;
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid("test_fraction", "must lie in (0, 1)"));
    }
    let n = x.nrows();
    let n_test = ((n as f64) * test_fraction).round() as usize;
    if n_test < 1 || n - n_test < 2 {
        return Err(Error::invalid("test_fraction", "split leaves too few rows"));
    }
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test_rows = rows[..n_test].to_vec();
    let mut train_rows = rows[n_test..].to_vec();
    test_rows.sort_unstable();
    train_rows.sort_unstable();
    let train = standardize(x.select(Axis(0), &train_rows), y.select(Axis(0), &train_rows))?;
    Ok(TrainTestSplit {
        train,
        test_x: x.select(Axis(0), &test_rows),
        test_y: y.select(Axis(0), &test_rows),
        train_rows,
        test_rows,
    })
}
