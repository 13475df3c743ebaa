use ndarray::ArrayView1;

use super::summary::SelectionReport;
use crate::data::SyntheticTruth;
use crate::error::{Error, Result};
use crate::model::Dataset;

/// Selection confusion counts against a known support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_selection(selected: &[usize], support: &[usize], p: usize) -> Self {
        let mut truth = vec![false; p];
        for &j in support {
            truth[j] = true;
        }
        let mut chosen = vec![false; p];
        for &j in selected {
            chosen[j] = true;
        }
        let mut c = Confusion {
            tp: 0,
            fp: 0,
            fn_: 0,
            tn: 0,
        };
        for (&t, &s) in truth.iter().zip(&chosen) {
            match (t, s) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    fn ratio(num: usize, den: usize) -> f64 {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    }

    pub fn tpr(&self) -> f64 {
        Self::ratio(self.tp, self.tp + self.fn_)
    }

    pub fn fpr(&self) -> f64 {
        Self::ratio(self.fp, self.fp + self.tn)
    }

    pub fn fdr(&self) -> f64 {
        self.fp as f64 / (self.tp + self.fp).max(1) as f64
    }

    pub fn precision(&self) -> f64 {
        Self::ratio(self.tp, self.tp + self.fp)
    }

    /// Matthews correlation; 0 when any confusion-matrix margin is empty.
    pub fn mcc(&self) -> f64 {
        let (tp, fp, fn_, tn) = (
            self.tp as f64,
            self.fp as f64,
            self.fn_ as f64,
            self.tn as f64,
        );
        let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        if den == 0.0 {
            0.0
        } else {
            (tp * tn - fp * fn_) / den.sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub rmse_beta: f64,
    pub mse_y: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub fdr: f64,
    pub mcc: f64,
    pub runtime_sec: f64,
}

impl Metrics {
    pub const NAMES: [&'static str; 7] = ["rmse_beta", "mse_y", "tpr", "fpr", "mcc", "fdr", "runtime_sec"];

    /// Values in the order of [`Metrics::NAMES`].
    pub fn values(&self) -> [f64; 7] {
        [
            self.rmse_beta,
            self.mse_y,
            self.tpr,
            self.fpr,
            self.mcc,
            self.fdr,
            self.runtime_sec,
        ]
    }
}

/// Estimation, fit and selection metrics on the standardized scale of `data`.
///
/// `rmse_beta = sqrt(sum_j (post_mean_j - beta0_j)^2 / p)` with the truth
/// rescaled to standardized units; `mse_y = ||y - X post_mean||^2 / n`.
pub fn compute_metrics(
    report: &SelectionReport,
    truth: &SyntheticTruth,
    data: &Dataset,
    runtime_sec: f64,
) -> Result<Metrics> {
    let p = data.p();
    if report.p() != p || truth.beta0.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "report has {} coordinates, truth {}, data {}",
            report.p(),
            truth.beta0.len(),
            p
        )));
    }
    data.require_standardized()?;
    let beta0 = truth.standardized_beta(data.stats());
    let sq: f64 = report
        .post_mean
        .iter()
        .zip(&beta0)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    let fitted = data.x().dot(&ArrayView1::from(&report.post_mean[..]));
    let resid = data.y() - &fitted;
    let conf = Confusion::from_selection(&report.selected, &truth.support, p);
    Ok(Metrics {
        rmse_beta: (sq / p as f64).sqrt(),
        mse_y: resid.dot(&resid) / data.n() as f64,
        tpr: conf.tpr(),
        fpr: conf.fpr(),
        fdr: conf.fdr(),
        mcc: conf.mcc(),
        runtime_sec,
    })
}
