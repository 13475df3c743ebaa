//! Run artifacts owned by the command line: truth files, string tables and
//! response-column resolution.

use std::fmt::Write as _;
use std::path::Path;

use bugs_core::data::{read_table, standardize, SyntheticTruth, Table};
use bugs_core::model::Dataset;

use crate::{write_text, CliError};

/// Writes `rho`, `sigma_noise` and the raw-scale coefficients as `key = value`.
pub fn write_truth(path: &Path, truth: &SyntheticTruth) -> Result<(), CliError> {
    let beta: Vec<String> = truth.beta0.iter().map(|b| b.to_string()).collect();
    let text = format!(
        "rho = {}\nsigma_noise = {}\nbeta0 = {}\n",
        truth.rho,
        truth.sigma_noise,
        beta.join(",")
    );
    write_text(path, &text)
}

pub fn read_truth(path: &Path) -> Result<SyntheticTruth, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(CliError::io(format!("cannot read {}", path.display())))?;
    let bad = |what: &str| CliError::Config(format!("{}: {what}", path.display()));
    let (mut rho, mut sigma, mut beta) = (None, None, None);
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
        let v = v.trim();
        match k.trim() {
            "rho" => rho = Some(v.parse().map_err(|_| bad("bad rho"))?),
            "sigma_noise" => sigma = Some(v.parse().map_err(|_| bad("bad sigma_noise"))?),
            "beta0" => {
                beta = Some(
                    v.split(',')
                        .map(|b| b.trim().parse::<f64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| bad("bad beta0 entry"))?,
                )
            }
            other => return Err(bad(&format!("unknown key `{other}`"))),
        }
    }
    Ok(SyntheticTruth::from_coefficients(
        beta.ok_or_else(|| bad("missing beta0"))?,
        sigma.ok_or_else(|| bad("missing sigma_noise"))?,
        rho.ok_or_else(|| bad("missing rho"))?,
    ))
}

/// Writes a header and rows of preformatted cells.
pub fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        writeln!(s, "{}", row.join(",")).unwrap();
    }
    write_text(path, &s)
}

/// `last`, a header name, or a 1-based column number.
pub fn resolve_response(spec: &str, headers: &[String]) -> Result<usize, CliError> {
    if spec == "last" {
        return headers
            .len()
            .checked_sub(1)
            .ok_or_else(|| CliError::Config("table has no columns".into()));
    }
    if let Some(i) = headers.iter().position(|h| h == spec) {
        return Ok(i);
    }
    match spec.parse::<usize>() {
        Ok(k) if (1..=headers.len()).contains(&k) => Ok(k - 1),
        _ => Err(CliError::Config(format!("response column `{spec}` not found"))),
    }
}

/// Reads a CSV, splits off the response and standardizes.
pub fn load_dataset(path: &Path, response: &str) -> Result<(Dataset, Table), CliError> {
    let table = read_table(path)?;
    let col = resolve_response(response, &table.headers)?;
    if table.headers.len() < 2 {
        return Err(CliError::Config(format!(
            "{}: need a response and at least one predictor",
            path.display()
        )));
    }
    let (x, y, _) = table.split_column(col);
    Ok((standardize(x, y)?, table))
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}
