use std::time::Instant;

use bugs_core::analysis::{compute_metrics, summarize, Metrics, SelectionReport};
use bugs_core::data::{write_chains, write_report};
use bugs_core::model::{guidance_scores, guidance_statistics, Standardization};
use bugs_core::samplers::{run_sampler, ChainStore, StageTimings};
use rayon::prelude::*;

use crate::diagnose::{diagnostics, write_diagnostics, DiagnosticRow, Param};
use crate::files::{load_dataset, read_truth, write_rows};
use crate::{
    active_config, guidance_config, hyperparameters, mcmc_config, prepare_output, stream_seed,
    thread_pool, use_sparse_storage, CliError, Settings,
};

pub struct FitOutput {
    pub chains: Vec<ChainStore>,
    pub timings: Vec<StageTimings>,
    pub report: SelectionReport,
    pub stats: Standardization,
    pub metrics: Option<Metrics>,
    pub diagnostics: Vec<DiagnosticRow>,
}

/// Runs `chains` independently seeded chains and writes `chains/chain_<k>.csv`,
/// `report.txt`, `diagnostics.csv` and, given a truth file, `metrics.csv`.
pub fn fit(s: &Settings, active: bool) -> Result<FitOutput, CliError> {
    let input = s.require_path("input")?;
    let (data, _) = load_dataset(&input, s.raw("response"))?;
    let p = data.p();
    let truth = s.path("truth").map(|t| read_truth(&t)).transpose()?;
    if let Some(t) = &truth {
        if t.beta0.len() != p {
            return Err(CliError::Config(format!(
                "truth has {} coefficients, data has {p} predictors",
                t.beta0.len()
            )));
        }
    }
    let guidance = guidance_statistics(&guidance_scores(&data)?, guidance_config(s)?)?;
    let hyper = hyperparameters(s)?;
    let seed: u64 = s.get("seed")?;
    let n_chains: usize = s.get("chains")?;
    if n_chains == 0 {
        return Err(CliError::Config("chains must be at least 1".into()));
    }
    let sparse = use_sparse_storage(s, p, active)?;
    let base = mcmc_config(s, seed, sparse)?;
    let active_cfg = active.then(|| active_config(s, p)).transpose()?;
    let (delta, cutoff): (f64, f64) = (s.get("delta")?, s.get("prob_cutoff")?);
    let out = prepare_output(s)?;

    let start = Instant::now();
    let runs = thread_pool(s)?.install(|| {
        (0..n_chains)
            .into_par_iter()
            .map(|k| {
                let cfg = bugs_core::samplers::McmcConfig {
                    seed: stream_seed(seed, k as u64),
                    ..base
                };
                run_sampler(&data, &guidance, &hyper, &cfg, active_cfg.as_ref(), |_| {})
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let runtime = start.elapsed().as_secs_f64();
    let (chains, timings): (Vec<ChainStore>, Vec<StageTimings>) =
        runs.into_iter().map(|r| (r.store, r.timings)).unzip();

    let chain_dir = out.join("chains");
    std::fs::create_dir_all(&chain_dir).map_err(CliError::io(format!("cannot create {}", chain_dir.display())))?;
    let ext = if s.get("compress")? { "csv.gz" } else { "csv" };
    for (k, c) in chains.iter().enumerate() {
        write_chains(c, chain_dir.join(format!("chain_{}.{ext}", k + 1)))?;
    }

    let pooled = ChainStore::pool(&chains)?;
    let report = summarize(&pooled, delta, cutoff)?;
    let metrics = truth
        .as_ref()
        .map(|t| compute_metrics(&report, t, &data, runtime))
        .transpose()?;
    write_report(out.join("report.txt"), &report, Some(data.stats()), metrics.as_ref())?;
    if let Some(m) = &metrics {
        let header: Vec<String> = Metrics::NAMES.iter().map(|n| n.to_string()).collect();
        write_rows(&out.join("metrics.csv"), &header, &[m.values().iter().map(|v| v.to_string()).collect()])?;
    }
    let mut params = Param::SCALARS.to_vec();
    params.extend(report.selected.iter().map(|&j| Param::Beta(j)));
    let diag = diagnostics(&chains, &params);
    write_diagnostics(&out.join("diagnostics.csv"), &diag)?;

    let lambda: f64 = timings.iter().map(|t| t.lambda_per_iteration().as_secs_f64()).sum::<f64>()
        / timings.len() as f64;
    println!(
        "{} chain(s), {} kept draws each, {:.2}s; selected {} of {p} predictors; lambda update {:.2} ms/iteration",
        n_chains,
        chains[0].n_kept(),
        runtime,
        report.selected.len(),
        lambda * 1e3
    );
    if let Some(m) = &metrics {
        println!("tpr {:.3}  fpr {:.4}  fdr {:.3}  mcc {:.3}  rmse_beta {:.5}", m.tpr, m.fpr, m.fdr, m.mcc, m.rmse_beta);
    }
    Ok(FitOutput {
        chains,
        timings,
        report,
        stats: data.stats().clone(),
        metrics,
        diagnostics: diag,
    })
}
