use bugs_core::analysis::{predict as predict_raw, prediction_metrics, PredictionMetrics};
use bugs_core::data::{read_report, read_table};
use ndarray::Array1;

use crate::files::{resolve_response, write_rows};
use crate::{prepare_output, CliError, Settings};

pub struct PredictOutput {
    pub y_hat: Array1<f64>,
    pub metrics: Option<PredictionMetrics>,
}

/// Scores `input` with the posterior means of `report`. An input with one
/// column more than the fitted predictors is taken to contain the response,
/// and accuracy metrics are written alongside the predictions.
pub fn predict(s: &Settings) -> Result<PredictOutput, CliError> {
    let report_path = s.require_path("report")?;
    let saved = read_report(&report_path)?;
    let stats = saved.stats.ok_or_else(|| {
        CliError::Config(format!("{} has no standardization section", report_path.display()))
    })?;
    let p = saved.report.p();
    let table = read_table(s.require_path("input")?)?;
    let (x, y) = if table.headers.len() == p + 1 {
        let col = resolve_response(s.raw("response"), &table.headers)?;
        let (x, y, _) = table.split_column(col);
        (x, Some(y))
    } else {
        (table.values, None)
    };
    let y_hat = predict_raw(&saved.report, &x, &stats)?;
    let metrics = y.as_ref().map(|y| prediction_metrics(y, &y_hat)).transpose()?;

    let out = prepare_output(s)?;
    let (header, rows): (Vec<String>, Vec<Vec<String>>) = match &y {
        Some(y) => (
            vec!["y".into(), "y_hat".into()],
            y.iter().zip(&y_hat).map(|(a, b)| vec![a.to_string(), b.to_string()]).collect(),
        ),
        None => (vec!["y_hat".into()], y_hat.iter().map(|b| vec![b.to_string()]).collect()),
    };
    write_rows(&out.join("predictions.csv"), &header, &rows)?;
    if let Some(m) = &metrics {
        let header = ["rmse", "mae", "corr", "r2"].map(String::from).to_vec();
        let row = [m.rmse, m.mae, m.corr, m.r2].iter().map(|v| v.to_string()).collect();
        write_rows(&out.join("prediction_metrics.csv"), &header, &[row])?;
        println!("rmse {:.4}  mae {:.4}  corr {:.4}  r2 {:.4}", m.rmse, m.mae, m.corr, m.r2);
    }
    println!("wrote {} predictions", y_hat.len());
    Ok(PredictOutput { y_hat, metrics })
}
