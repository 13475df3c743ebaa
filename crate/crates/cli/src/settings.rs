//! Flat `key = value` settings with three layers: built-in defaults, an
//! optional config file, and command-line flags (highest precedence).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

/// Every key any command understands, with its built-in default.
/// `""` means "unset".
const DEFAULTS: &[(&str, &str)] = &[
    ("seed", "0"),
    ("out", "bugs_out"),
    ("input", ""),
    ("response", "last"),
    ("truth", ""),
    ("report", ""),
    ("threads", "0"),
    // simulation
    ("n", "100"),
    ("p", "200"),
    ("rho", "0"),
    ("test_fraction", "0"),
    // guidance
    ("epsilon", "1e-8"),
    ("clip_bound", "3"),
    // priors
    ("tau0", "1"),
    ("a_c", "2"),
    ("b_c", "8"),
    ("sigma_eta_sq", "1"),
    ("a_sigma", "1"),
    ("b_sigma", "1"),
    // sampler
    ("iters", "5000"),
    ("burnin", "1000"),
    ("thin", "1"),
    ("chains", "1"),
    ("eta_fixed_zero", "false"),
    ("slice_width", "1"),
    ("max_stepout", "50"),
    ("max_shrink", "100"),
    ("beta_storage", "auto"),
    ("compress", "false"),
    // active set
    ("guidance_budget", "auto"),
    ("coef_threshold", "1e-4"),
    ("lambda_baseline", "1e-3"),
    ("max_active", "0"),
    // selection
    ("delta", "0.01"),
    ("prob_cutoff", "0.5"),
    // benchmark
    ("replications", "10"),
    ("methods", "guided,unguided"),
    // diagnose
    ("params", "auto"),
];

pub fn is_known(key: &str) -> bool {
    DEFAULTS.iter().any(|(k, _)| *k == key)
}

pub fn normalize_key(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('-', "_")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    command: String,
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Merges defaults, the config file (if any) and `cli` pairs.
    pub fn resolve(command: &str, config: Option<&Path>, cli: &[(String, String)]) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, String> =
            DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = config {
            for (key, value) in parse_config_file(path)? {
                values.insert(key, value);
            }
        }
        for (key, value) in cli {
            let key = normalize_key(key);
            if key == "config" {
                continue;
            }
            if !values.contains_key(&key) {
                return Err(CliError::Config(format!("unknown setting `{key}`")));
            }
            values.insert(key, value.clone());
        }
        Ok(Settings {
            command: command.to_string(),
            values,
        })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("setting `{key}` has no default"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|_| CliError::Config(format!("invalid value `{raw}` for `{key}`")))
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            "" | "auto" => Ok(None),
            _ => self.get(key).map(Some),
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        Some(self.raw(key)).filter(|s| !s.is_empty()).map(PathBuf::from)
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf, CliError> {
        self.path(key)
            .ok_or_else(|| CliError::Config(format!("`--{}` is required", key.replace('_', "-"))))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError> {
        self.raw(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| CliError::Config(format!("invalid entry `{s}` in `{key}`")))
            })
            .collect()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    /// The effective settings as a config file that reproduces this run.
    pub fn to_config_text(&self) -> String {
        let mut s = format!("# bugs {}\n", self.command);
        for (k, v) in &self.values {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{}:{}: expected `key = value`", path.display(), i + 1))
        })?;
        let key = normalize_key(key);
        if !is_known(&key) {
            return Err(CliError::Config(format!(
                "{}:{}: unknown setting `{key}`",
                path.display(),
                i + 1
            )));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}
