use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::samplers::ChainStore;

/// Per-coordinate posterior summaries and the selected set.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub post_mean: Vec<f64>,
    /// 2.5% equal-tailed bound.
    pub ci_lower: Vec<f64>,
    /// 97.5% equal-tailed bound.
    pub ci_upper: Vec<f64>,
    /// Fraction of draws with `|beta_j| > threshold_delta`.
    pub sel_prob: Vec<f64>,
    /// 0-based, ascending.
    pub selected: Vec<usize>,
    pub threshold_delta: f64,
    pub prob_cutoff: f64,
}

impl SelectionReport {
    pub fn p(&self) -> usize {
        self.post_mean.len()
    }

    pub fn selected_set(&self) -> BTreeSet<usize> {
        self.selected.iter().copied().collect()
    }

    /// Re-applies the selection rule with a different probability cutoff.
    pub fn with_cutoff(&self, prob_cutoff: f64) -> SelectionReport {
        SelectionReport {
            selected: select(&self.sel_prob, prob_cutoff),
            prob_cutoff,
            ..self.clone()
        }
    }
}

fn select(sel_prob: &[f64], cutoff: f64) -> Vec<usize> {
    sel_prob
        .iter()
        .enumerate()
        .filter(|(_, &q)| q >= cutoff)
        .map(|(j, _)| j)
        .collect()
}

/// Linear-interpolation (type 7) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summarizes stored coefficient draws. Coordinates without stored draws get
/// a zero mean, a degenerate interval at 0 and selection probability 0.
pub fn summarize(store: &ChainStore, delta: f64, prob_cutoff: f64) -> Result<SelectionReport> {
    if store.n_kept() == 0 {
        return Err(Error::invalid("chain store", "no kept draws to summarize"));
    }
    if !(delta >= 0.0) {
        return Err(Error::invalid("delta", "must be non-negative"));
    }
    if !(0.0..=1.0).contains(&prob_cutoff) {
        return Err(Error::invalid("prob_cutoff", "must lie in [0, 1]"));
    }
    let p = store.p;
    let mut report = SelectionReport {
        post_mean: vec![0.0; p],
        ci_lower: vec![0.0; p],
        ci_upper: vec![0.0; p],
        sel_prob: vec![0.0; p],
        selected: Vec::new(),
        threshold_delta: delta,
        prob_cutoff,
    };
    let k = store.n_kept() as f64;
    let mut buf = Vec::with_capacity(store.n_kept());
    for (col, &j) in store.beta_index.iter().enumerate() {
        buf.clear();
        buf.extend(store.beta_draws.column(col).iter().copied());
        report.post_mean[j] = buf.iter().sum::<f64>() / k;
        report.sel_prob[j] = buf.iter().filter(|b| b.abs() > delta).count() as f64 / k;
        buf.sort_by(f64::total_cmp);
        report.ci_lower[j] = quantile_sorted(&buf, 0.025);
        report.ci_upper[j] = quantile_sorted(&buf, 0.975);
    }
    report.selected = select(&report.sel_prob, prob_cutoff);
    Ok(report)
}
