use std::time::Instant;

use bugs_core::analysis::{compute_metrics, summarize, Metrics};
use bugs_core::data::generate_scenario;
use bugs_core::model::{guidance_scores, guidance_statistics};
use bugs_core::samplers::{run_sampler, McmcConfig};
use rayon::prelude::*;

use crate::files::write_rows;
use crate::{
    active_config, guidance_config, hyperparameters, mcmc_config, prepare_output, stream_seed,
    thread_pool, use_sparse_storage, CliError, Settings,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Guided,
    Unguided,
    Active,
}

impl Method {
    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "guided" => Some(Method::Guided),
            "unguided" => Some(Method::Unguided),
            "active" => Some(Method::Active),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::Guided => "BUGS",
            Method::Unguided => "BUGS-unguided",
            Method::Active => "BUGS-Active",
        }
    }
}

/// Aggregated metrics of one (method, rho, p) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub method: Method,
    pub rho: f64,
    pub p: usize,
    pub n: usize,
    pub replications: Vec<Metrics>,
}

impl BenchmarkRow {
    /// Mean and standard error of `f` over replications.
    pub fn mean_se(&self, f: impl Fn(&Metrics) -> f64) -> (f64, f64) {
        let v: Vec<f64> = self.replications.iter().map(f).collect();
        let k = v.len() as f64;
        let m = v.iter().sum::<f64>() / k;
        if v.len() < 2 {
            return (m, 0.0);
        }
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0);
        (m, (var / k).sqrt())
    }
}

const TABLE_METRICS: [(&str, fn(&Metrics) -> f64); 6] = [
    ("rmse_beta", |m| m.rmse_beta),
    ("mse_y", |m| m.mse_y),
    ("tpr", |m| m.tpr),
    ("fpr", |m| m.fpr),
    ("mcc", |m| m.mcc),
    ("fdr", |m| m.fdr),
];

fn key_cells(r: &BenchmarkRow) -> Vec<String> {
    vec![r.method.label().to_string(), r.rho.to_string(), r.p.to_string(), r.n.to_string(), r.replications.len().to_string()]
}

fn key_header() -> Vec<String> {
    ["method", "rho", "p", "n", "replications"].map(String::from).to_vec()
}

/// Writes `benchmark.csv` (means and standard errors of the accuracy
/// metrics, reproducible for a fixed seed), `timing.csv` (run time) and
/// `replications.csv` (one line per fit).
pub fn benchmark(s: &Settings) -> Result<Vec<BenchmarkRow>, CliError> {
    let reps: usize = s.get("replications")?;
    if reps == 0 {
        return Err(CliError::Config("replications must be at least 1".into()));
    }
    let n: usize = s.get("n")?;
    let ps: Vec<usize> = s.list("p")?;
    let rhos: Vec<f64> = s.list("rho")?;
    let methods: Vec<Method> = s
        .raw("methods")
        .split(',')
        .map(|m| Method::parse(m.trim()).ok_or_else(|| CliError::Config(format!("unknown method `{m}`"))))
        .collect::<Result<_, _>>()?;
    if ps.is_empty() || rhos.is_empty() || methods.is_empty() {
        return Err(CliError::Config("benchmark grid is empty".into()));
    }
    let seed: u64 = s.get("seed")?;
    let hyper = hyperparameters(s)?;
    let gcfg = guidance_config(s)?;
    let (delta, cutoff): (f64, f64) = (s.get("delta")?, s.get("prob_cutoff")?);
    // validate sampler settings before spawning work
    mcmc_config(s, seed, false)?;

    let mut cells = Vec::new();
    for (ri, &rho) in rhos.iter().enumerate() {
        for (pi, &p) in ps.iter().enumerate() {
            for &m in &methods {
                cells.push((ri, rho, pi, p, m));
            }
        }
    }
    let jobs: Vec<_> = cells
        .iter()
        .flat_map(|&c| (0..reps).map(move |r| (c, r)))
        .collect();
    let out = prepare_output(s)?;
    let results = thread_pool(s)?.install(|| {
        jobs.par_iter()
            .map(|&((ri, rho, pi, p, method), rep)| -> Result<Metrics, CliError> {
                let data_seed = stream_seed(seed, ((ri * ps.len() + pi) * reps + rep) as u64);
                let (data, truth) = generate_scenario(n, p, rho, data_seed)?;
                let guidance = guidance_statistics(&guidance_scores(&data)?, gcfg)?;
                let is_active = method == Method::Active;
                let cfg = McmcConfig {
                    fix_eta_zero: method == Method::Unguided || s.get("eta_fixed_zero")?,
                    ..mcmc_config(s, stream_seed(data_seed, 1), use_sparse_storage(s, p, is_active)?)?
                };
                let acfg = is_active.then(|| active_config(s, p)).transpose()?;
                let start = Instant::now();
                let run = run_sampler(&data, &guidance, &hyper, &cfg, acfg.as_ref(), |_| {})?;
                let runtime = start.elapsed().as_secs_f64();
                let report = summarize(&run.store, delta, cutoff)?;
                Ok(compute_metrics(&report, &truth, &data, runtime)?)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let rows: Vec<BenchmarkRow> = cells
        .iter()
        .enumerate()
        .map(|(i, &(_, rho, _, p, method))| BenchmarkRow {
            method,
            rho,
            p,
            n,
            replications: results[i * reps..(i + 1) * reps].to_vec(),
        })
        .collect();

    let mut header = key_header();
    for (name, _) in TABLE_METRICS {
        header.push(format!("{name}_mean"));
        header.push(format!("{name}_se"));
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = key_cells(r);
            for (_, f) in TABLE_METRICS {
                let (m, se) = r.mean_se(f);
                cells.push(m.to_string());
                cells.push(se.to_string());
            }
            cells
        })
        .collect();
    write_rows(&out.join("benchmark.csv"), &header, &table)?;

    let mut theader = key_header();
    theader.extend(["runtime_sec_mean", "runtime_sec_se"].map(String::from));
    let timing: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let (m, se) = r.mean_se(|m| m.runtime_sec);
            let mut cells = key_cells(r);
            cells.extend([m.to_string(), se.to_string()]);
            cells
        })
        .collect();
    write_rows(&out.join("timing.csv"), &theader, &timing)?;

    let mut rheader = ["method", "rho", "p", "n", "replication"].map(String::from).to_vec();
    rheader.extend(Metrics::NAMES.iter().map(|s| s.to_string()));
    let per_rep: Vec<Vec<String>> = rows
        .iter()
        .flat_map(|r| {
            r.replications.iter().enumerate().map(move |(k, m)| {
                let mut cells = vec![r.method.label().to_string(), r.rho.to_string(), r.p.to_string(), r.n.to_string(), (k + 1).to_string()];
                cells.extend(m.values().iter().map(|v| v.to_string()));
                cells
            })
        })
        .collect();
    write_rows(&out.join("replications.csv"), &rheader, &per_rep)?;

    for r in &rows {
        let f = |g: fn(&Metrics) -> f64| {
            let (m, se) = r.mean_se(g);
            format!("{m:.3} ({se:.3})")
        };
        println!(
            "{:<14} rho={} p={}  tpr {}  fdr {}  mcc {}  rmse {}",
            r.method.label(),
            r.rho,
            r.p,
            f(|m| m.tpr),
            f(|m| m.fdr),
            f(|m| m.mcc),
            f(|m| m.rmse_beta)
        );
    }
    Ok(rows)
}
