//! Driver for simulation, fitting, benchmarking, prediction and diagnostics.
//!
//! Every command resolves its settings from built-in defaults, an optional
//! `--config` file and command-line flags, in increasing precedence, and
//! echoes the result to `<out>/config.txt`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use bugs_core::active::ActiveSetConfig;
use bugs_core::model::{GuidanceConfig, Hyperparameters};
use bugs_core::samplers::{BetaStorage, McmcConfig, SliceConfig};
use clap::parser::ValueSource;
use clap::CommandFactory;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod args;
pub mod benchmark;
pub mod diagnose;
pub mod files;
pub mod fit;
pub mod predict;
pub mod settings;
pub mod simulate;

pub use settings::Settings;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] bugs_core::Error),
}

impl CliError {
    /// 1 for a sampler abort, 2 for I/O and configuration problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Core(e) if e.is_sampler_failure() => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = args::Cli::command().try_get_matches_from(args)?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let mut flags = Vec::new();
    let mut config = None;
    for id in sub.ids() {
        let id = id.as_str();
        if id != "config" && !settings::is_known(id) {
            continue;
        }
        if sub.value_source(id) != Some(ValueSource::CommandLine) {
            continue;
        }
        let Ok(Some(raw)) = sub.try_get_raw(id) else {
            continue;
        };
        let value = raw
            .map(|v| v.to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join(",");
        if id == "config" {
            config = Some(PathBuf::from(value));
        } else {
            flags.push((id.to_string(), value));
        }
    }
    let settings = Settings::resolve(name, config.as_deref(), &flags)?;
    match name {
        "simulate" => simulate::simulate(&settings).map(|_| ()),
        "fit" => fit::fit(&settings, false).map(|_| ()),
        "fit-active" => fit::fit(&settings, true).map(|_| ()),
        "benchmark" => benchmark::benchmark(&settings).map(|_| ()),
        "predict" => predict::predict(&settings).map(|_| ()),
        "diagnose" => diagnose::diagnose(&settings).map(|_| ()),
        other => unreachable!("unhandled subcommand {other}"),
    }
}

/// Independent seed for stream `stream` of a run seeded with `seed`.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Creates the output directory and writes the effective settings to it.
pub fn prepare_output(settings: &Settings) -> Result<PathBuf, CliError> {
    let out = settings.require_path("out")?;
    std::fs::create_dir_all(&out).map_err(CliError::io(format!("cannot create {}", out.display())))?;
    write_text(&out.join("config.txt"), &settings.to_config_text())?;
    Ok(out)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(CliError::io(format!("cannot write {}", path.display())))
}

pub(crate) fn thread_pool(settings: &Settings) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(settings.get("threads")?)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

pub fn guidance_config(s: &Settings) -> Result<GuidanceConfig, CliError> {
    Ok(GuidanceConfig::new(s.get("epsilon")?, s.get("clip_bound")?)?)
}

pub fn hyperparameters(s: &Settings) -> Result<Hyperparameters, CliError> {
    let h = Hyperparameters {
        tau0: s.get("tau0")?,
        a_c: s.get("a_c")?,
        b_c: s.get("b_c")?,
        sigma_eta_sq: s.get("sigma_eta_sq")?,
        a_sigma: s.get("a_sigma")?,
        b_sigma: s.get("b_sigma")?,
    };
    h.validate()?;
    Ok(h)
}

/// Sampler settings; `storage_active` picks sparse coefficient storage.
pub fn mcmc_config(s: &Settings, seed: u64, storage_active: bool) -> Result<McmcConfig, CliError> {
    let cfg = McmcConfig {
        n_iter: s.get("iters")?,
        n_burnin: s.get("burnin")?,
        thin: s.get("thin")?,
        seed,
        slice: SliceConfig {
            width: s.get("slice_width")?,
            max_stepout: s.get("max_stepout")?,
            max_shrink: s.get("max_shrink")?,
        },
        fix_eta_zero: s.get("eta_fixed_zero")?,
        beta_storage: if storage_active {
            BetaStorage::Active
        } else {
            BetaStorage::All
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn active_config(s: &Settings, p: usize) -> Result<ActiveSetConfig, CliError> {
    let cfg = ActiveSetConfig {
        guidance_budget: s
            .get_opt("guidance_budget")?
            .unwrap_or_else(|| ActiveSetConfig::default_budget(p)),
        coef_threshold: s.get("coef_threshold")?,
        max_active: s.get("max_active")?,
        lambda_baseline: s.get("lambda_baseline")?,
    };
    cfg.validate(p)?;
    Ok(cfg)
}

/// Sparse coefficient storage is the default for active-set runs above 10^4
/// predictors; `beta_storage = all | active` overrides.
pub fn use_sparse_storage(s: &Settings, p: usize, active: bool) -> Result<bool, CliError> {
    match s.raw("beta_storage") {
        "auto" => Ok(active && p > 10_000),
        "all" => Ok(false),
        "active" => Ok(true),
        other => Err(CliError::Config(format!(
            "beta_storage must be auto, all or active, got `{other}`"
        ))),
    }
}
