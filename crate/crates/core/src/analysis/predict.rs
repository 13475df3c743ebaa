use ndarray::{Array1, Array2, ArrayView1};

use super::summary::SelectionReport;
use crate::data::apply_standardization;
use crate::error::{Error, Result};
use crate::model::Standardization;

/// Point predictions on the raw response scale from posterior-mean coefficients.
pub fn predict(
    report: &SelectionReport,
    x_new_raw: &Array2<f64>,
    stats: &Standardization,
) -> Result<Array1<f64>> {
    if report.p() != stats.p() {
        return Err(Error::DimensionMismatch(format!(
            "report has {} coefficients but standardization covers {} columns",
            report.p(),
            stats.p()
        )));
    }
    let x_std = apply_standardization(x_new_raw, stats)?;
    let fitted = x_std.dot(&ArrayView1::from(&report.post_mean[..]));
    Ok(fitted.mapv(|v| stats.y_mean + stats.y_sd * v))
}

/// Intercept and slopes of the posterior-mean fit on the raw scale.
pub fn raw_coefficients(report: &SelectionReport, stats: &Standardization) -> (f64, Vec<f64>) {
    let slopes: Vec<f64> = report
        .post_mean
        .iter()
        .zip(&stats.col_sds)
        .map(|(b, sd)| b * stats.y_sd / sd)
        .collect();
    let intercept = stats.y_mean
        - slopes
            .iter()
            .zip(&stats.col_means)
            .map(|(b, m)| b * m)
            .sum::<f64>();
    (intercept, slopes)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionMetrics {
    pub rmse: f64,
    pub mae: f64,
    pub corr: f64,
    pub r2: f64,
}

pub fn prediction_metrics(y: &Array1<f64>, y_hat: &Array1<f64>) -> Result<PredictionMetrics> {
    if y.len() != y_hat.len() || y.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} observations vs {} predictions",
            y.len(),
            y_hat.len()
        )));
    }
    let n = y.len() as f64;
    let resid = y - y_hat;
    let sse = resid.dot(&resid);
    let (my, mh) = (y.sum() / n, y_hat.sum() / n);
    let sst: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let shh: f64 = y_hat.iter().map(|v| (v - mh).powi(2)).sum();
    let cross: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - my) * (b - mh)).sum();
    let corr = if sst > 0.0 && shh > 0.0 {
        cross / (sst * shh).sqrt()
    } else {
        0.0
    };
    Ok(PredictionMetrics {
        rmse: (sse / n).sqrt(),
        mae: resid.iter().map(|v| v.abs()).sum::<f64>() / n,
        corr,
        r2: if sst > 0.0 { 1.0 - sse / sst } else { 0.0 },
    })
}
