use std::path::{Path, PathBuf};

use bugs_core::analysis::{effective_sample_size, gelman_rubin};
use bugs_core::data::{read_chains, read_report};
use bugs_core::samplers::ChainStore;

use crate::files::{fmt_opt, write_rows};
use crate::{prepare_output, CliError, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Tau,
    CSq,
    Eta,
    SigmaSq,
    /// 0-based coordinate.
    Beta(usize),
}

impl Param {
    pub const SCALARS: [Param; 4] = [Param::Tau, Param::CSq, Param::Eta, Param::SigmaSq];

    pub fn name(&self) -> String {
        match self {
            Param::Tau => "tau".into(),
            Param::CSq => "c_sq".into(),
            Param::Eta => "eta".into(),
            Param::SigmaSq => "sigma_sq".into(),
            Param::Beta(j) => format!("beta_{}", j + 1),
        }
    }

    pub fn parse(s: &str) -> Option<Param> {
        Some(match s {
            "tau" => Param::Tau,
            "c_sq" => Param::CSq,
            "eta" => Param::Eta,
            "sigma_sq" => Param::SigmaSq,
            _ => Param::Beta(s.strip_prefix("beta_")?.parse::<usize>().ok()?.checked_sub(1)?),
        })
    }

    /// Draws of this parameter; coefficients outside the stored set are 0.
    pub fn draws(&self, c: &ChainStore) -> Vec<f64> {
        match self {
            Param::Tau => c.tau_draws.clone(),
            Param::CSq => c.c_sq_draws.clone(),
            Param::Eta => c.eta_draws.clone(),
            Param::SigmaSq => c.sigma_sq_draws.clone(),
            Param::Beta(j) => c
                .beta_column(*j)
                .map_or_else(|| vec![0.0; c.n_kept()], |col| col.to_vec()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub param: Param,
    /// `None` with fewer than two chains or too few draws.
    pub rhat: Option<f64>,
    pub ess: Vec<Option<f64>>,
}

pub fn diagnostics(chains: &[ChainStore], params: &[Param]) -> Vec<DiagnosticRow> {
    params
        .iter()
        .map(|&param| {
            let draws: Vec<Vec<f64>> = chains.iter().map(|c| param.draws(c)).collect();
            DiagnosticRow {
                param,
                rhat: gelman_rubin(&draws).ok(),
                ess: draws.iter().map(|d| effective_sample_size(d).ok()).collect(),
            }
        })
        .collect()
}

pub fn write_diagnostics(path: &Path, rows: &[DiagnosticRow]) -> Result<(), CliError> {
    let k = rows.first().map_or(0, |r| r.ess.len());
    let mut header = vec!["parameter".to_string(), "rhat".to_string()];
    header.extend((1..=k).map(|i| format!("ess_chain_{i}")));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.param.name(), fmt_opt(r.rhat)];
            row.extend(r.ess.iter().map(|e| fmt_opt(*e)));
            row
        })
        .collect();
    write_rows(path, &header, &body)
}

/// Chain files `chain_<k>.csv[.gz]` in `dir`, ordered by `k`.
pub fn chain_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(CliError::io(format!("cannot list {}", dir.display())))?;
    let mut found = Vec::new();
    for entry in entries {
        let path = entry.map_err(CliError::io(format!("cannot list {}", dir.display())))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        let k = name
            .strip_prefix("chain_")
            .and_then(|r| r.strip_suffix(".csv.gz").or_else(|| r.strip_suffix(".csv")))
            .and_then(|k| k.parse::<usize>().ok());
        if let Some(k) = k {
            found.push((k, path));
        }
    }
    found.sort();
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

/// Reads `<input>/chains/` and writes `<out>/diagnostics.csv`.
pub fn diagnose(s: &Settings) -> Result<Vec<DiagnosticRow>, CliError> {
    let input = s.require_path("input")?;
    let report_path = input.join("report.txt");
    let report = report_path.exists().then(|| read_report(&report_path)).transpose()?;
    let p = report.as_ref().map(|r| r.report.p());
    let files = chain_files(&input.join("chains"))?;
    if files.is_empty() {
        return Err(CliError::Config(format!("no chain files under {}", input.join("chains").display())));
    }
    let chains = files
        .iter()
        .map(|f| read_chains(f, p))
        .collect::<Result<Vec<_>, _>>()?;
    let params: Vec<Param> = match s.raw("params") {
        "auto" => {
            let mut v = Param::SCALARS.to_vec();
            if let Some(r) = &report {
                v.extend(r.report.selected.iter().map(|&j| Param::Beta(j)));
            }
            v
        }
        list => list
            .split(',')
            .map(|t| Param::parse(t.trim()).ok_or_else(|| CliError::Config(format!("unknown parameter `{t}`"))))
            .collect::<Result<_, _>>()?,
    };
    let rows = diagnostics(&chains, &params);
    let out = prepare_output(s)?;
    write_diagnostics(&out.join("diagnostics.csv"), &rows)?;
    for r in &rows {
        let ess: Vec<String> = r.ess.iter().map(|e| e.map_or("NA".into(), |e| format!("{e:.0}"))).collect();
        println!("{:>10}  rhat {}  ess {}", r.param.name(), r.rhat.map_or("NA".into(), |v| format!("{v:.3}")), ess.join(" "));
    }
    Ok(rows)
}
