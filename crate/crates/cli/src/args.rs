//! Command-line surface. Values are read back generically from the matches
//! by argument id, which doubles as the config-file key, so no field here is
//! accessed directly and none carries a clap default.
#![allow(dead_code)]

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bugs", version, about = "Guided regularized-horseshoe regression")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and its true coefficients
    Simulate(SimulateArgs),
    /// Fit with the full sampler
    Fit(FitArgs),
    /// Fit with the active-set sampler
    FitActive(FitActiveArgs),
    /// Replicated guided/unguided comparison on synthetic scenarios
    Benchmark(BenchmarkArgs),
    /// Score new observations with a saved report
    Predict(PredictArgs),
    /// Convergence diagnostics for saved chains
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct Shared {
    /// Random seed
    #[arg(long)]
    seed: Option<u64>,
    /// key = value settings file (flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: bugs_out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    shared: Shared,
    /// Observations [default: 100]
    #[arg(long)]
    n: Option<usize>,
    /// Predictors, at least 10 [default: 200]
    #[arg(long)]
    p: Option<usize>,
    /// Toeplitz correlation of adjacent predictors [default: 0]
    #[arg(long)]
    rho: Option<f64>,
    /// Also write a random train/test split with this test share
    #[arg(long)]
    test_fraction: Option<f64>,
}

#[derive(Args)]
struct Guidance {
    /// Stabilizer inside log(score + epsilon) [default: 1e-8]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Clip bound for guidance statistics [default: 3]
    #[arg(long)]
    clip_bound: Option<f64>,
}

#[derive(Args)]
struct Priors {
    /// Half-Cauchy scale of tau [default: 1]
    #[arg(long)]
    tau0: Option<f64>,
    /// Inverse-gamma shape of c^2 [default: 2]
    #[arg(long)]
    a_c: Option<f64>,
    /// Inverse-gamma rate of c^2 [default: 8]
    #[arg(long)]
    b_c: Option<f64>,
    /// Half-normal variance of eta [default: 1]
    #[arg(long)]
    sigma_eta_sq: Option<f64>,
    /// Inverse-gamma shape of sigma^2 [default: 1]
    #[arg(long)]
    a_sigma: Option<f64>,
    /// Inverse-gamma rate of sigma^2 [default: 1]
    #[arg(long)]
    b_sigma: Option<f64>,
}

#[derive(Args)]
struct Sampler {
    /// Total iterations [default: 5000]
    #[arg(long)]
    iters: Option<usize>,
    /// Burn-in iterations [default: 1000]
    #[arg(long)]
    burnin: Option<usize>,
    /// Keep every k-th post-burn-in draw [default: 1]
    #[arg(long)]
    thin: Option<usize>,
    /// Independent chains [default: 1]
    #[arg(long)]
    chains: Option<usize>,
    /// Fix eta at 0 (unguided regularized horseshoe)
    #[arg(long)]
    eta_fixed_zero: bool,
    /// Initial slice width [default: 1]
    #[arg(long)]
    slice_width: Option<f64>,
    /// Maximum stepping-out steps [default: 50]
    #[arg(long)]
    max_stepout: Option<usize>,
    /// Maximum shrinkage steps [default: 100]
    #[arg(long)]
    max_shrink: Option<usize>,
}

#[derive(Args)]
struct Selection {
    /// Selection threshold on |beta| (standardized scale) [default: 0.01]
    #[arg(long)]
    delta: Option<f64>,
    /// Minimum selection probability [default: 0.5]
    #[arg(long)]
    prob_cutoff: Option<f64>,
}

#[derive(Args)]
struct Active {
    /// Predictors admitted by guidance rank [default: max(50, 5% of p)]
    #[arg(long)]
    guidance_budget: Option<usize>,
    /// |beta| above which a predictor joins the active set [default: 1e-4]
    #[arg(long)]
    coef_threshold: Option<f64>,
    /// Local scale of inactive predictors [default: 1e-3]
    #[arg(long)]
    lambda_baseline: Option<f64>,
    /// Cap on the active-set size, 0 for none [default: 0]
    #[arg(long)]
    max_active: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    shared: Shared,
    /// Input CSV (header row, numeric body)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Response column: header name or 1-based index [default: last]
    #[arg(long)]
    response: Option<String>,
    /// truth.txt from `simulate`, enables selection metrics
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Coefficient columns to store: auto, all or active [default: auto]
    #[arg(long)]
    beta_storage: Option<String>,
    /// Gzip the chain files
    #[arg(long)]
    compress: bool,
    #[command(flatten)]
    guidance: Guidance,
    #[command(flatten)]
    priors: Priors,
    #[command(flatten)]
    sampler: Sampler,
    #[command(flatten)]
    selection: Selection,
}

#[derive(Args)]
struct FitActiveArgs {
    #[command(flatten)]
    fit: FitArgs,
    #[command(flatten)]
    active: Active,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    shared: Shared,
    /// Replications per scenario [default: 10]
    #[arg(long)]
    replications: Option<usize>,
    /// Observations [default: 100]
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated predictor counts [default: 200]
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated correlations [default: 0]
    #[arg(long)]
    rho: Option<String>,
    /// Comma-separated subset of guided, unguided, active [default: guided,unguided]
    #[arg(long)]
    methods: Option<String>,
    #[command(flatten)]
    guidance: Guidance,
    #[command(flatten)]
    priors: Priors,
    #[command(flatten)]
    sampler: Sampler,
    #[command(flatten)]
    selection: Selection,
    #[command(flatten)]
    active: Active,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    shared: Shared,
    /// CSV of new observations
    #[arg(long)]
    input: Option<PathBuf>,
    /// report.txt written by a fit
    #[arg(long)]
    report: Option<PathBuf>,
    /// Response column, if the input has one [default: last]
    #[arg(long)]
    response: Option<String>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    shared: Shared,
    /// Output directory of a fit
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated parameters (tau, c_sq, eta, sigma_sq, beta_<j>) [default: auto]
    #[arg(long)]
    params: Option<String>,
}
