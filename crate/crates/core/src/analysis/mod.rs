//! Posterior summaries, selection metrics, convergence diagnostics and prediction.

mod diagnostics;
mod metrics;
mod predict;
mod summary;

pub use diagnostics::{effective_sample_size, gelman_rubin};
pub use metrics::{compute_metrics, Confusion, Metrics};
pub use predict::{predict, prediction_metrics, raw_coefficients, PredictionMetrics};
pub use summary::{quantile_sorted, summarize, SelectionReport};
