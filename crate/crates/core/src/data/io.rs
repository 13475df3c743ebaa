//! Delimited-text readers and writers. Paths ending in `.gz` are transparently
//! gzip-compressed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use ndarray::{Array1, Array2, Axis};

use super::standardize;
use crate::analysis::{Metrics, SelectionReport};
use crate::error::{Error, Result};
use crate::model::{Dataset, Standardization};
use crate::samplers::ChainStore;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

fn open_reader(path: &Path) -> Result<Box<dyn Read>> {
    let file = File::open(path).map_err(io_err(path))?;
    Ok(if is_gz(path) {
        Box::new(GzDecoder::new(BufReader::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

fn create_writer(path: &Path) -> Result<Box<dyn Write>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let file = BufWriter::new(File::create(path).map_err(io_err(path))?);
    Ok(if is_gz(path) {
        Box::new(GzEncoder::new(file, Compression::default()))
    } else {
        Box::new(file)
    })
}

/// A numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub values: Array2<f64>,
}

/// How the response column is located in a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseColumn {
    Name(String),
    /// 0-based column index.
    Index(usize),
    Last,
}

impl Table {
    pub fn column_index(&self, response: &ResponseColumn) -> Option<usize> {
        match response {
            ResponseColumn::Name(name) => self.headers.iter().position(|h| h == name),
            ResponseColumn::Index(i) => (*i < self.headers.len()).then_some(*i),
            ResponseColumn::Last => self.headers.len().checked_sub(1),
        }
    }

    /// Splits off column `col` as the response.
    pub fn split_column(&self, col: usize) -> (Array2<f64>, Array1<f64>, Vec<String>) {
        let keep: Vec<usize> = (0..self.headers.len()).filter(|&c| c != col).collect();
        let x = self.values.select(Axis(1), &keep);
        let y = self.values.column(col).to_owned();
        let names = keep.iter().map(|&c| self.headers[c].clone()).collect();
        (x, y, names)
    }
}

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

/// Reads a comma-separated numeric table with one header row.
pub fn read_table(path: impl AsRef<Path>) -> Result<Table> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open_reader(path)?);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| parse_error(path, 1, 0, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(parse_error(path, 1, 0, "missing header row"));
    }
    let width = headers.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, 0, e.to_string())
        })?;
        let line = record.position().map_or(rows + 2, |p| p.line() as usize);
        if record.len() != width {
            return Err(parse_error(
                path,
                line,
                record.len().min(width) + 1,
                format!("expected {} fields, found {}", width, record.len()),
            ));
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_error(path, line, c + 1, format!("`{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(path, line, c + 1, format!("`{field}` is not finite")));
            }
            values.push(v);
        }
        rows += 1;
    }
    let values = Array2::from_shape_vec((rows, width), values).expect("rows have equal width");
    Ok(Table { headers, values })
}

/// Reads a table, extracts the response and standardizes.
pub fn read_dataset(path: impl AsRef<Path>, response: &ResponseColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let col = table.column_index(response).ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        message: format!("response column {response:?} not found"),
    })?;
    if table.headers.len() < 2 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "need at least one predictor column besides the response".into(),
        });
    }
    let (x, y, _) = table.split_column(col);
    standardize(x, y)
}

pub fn write_table(path: impl AsRef<Path>, headers: &[String], values: &Array2<f64>) -> Result<()> {
    let path = path.as_ref();
    assert_eq!(headers.len(), values.ncols());
    let mut w = create_writer(path)?;
    let mut line = headers.join(",");
    line.push('\n');
    w.write_all(line.as_bytes()).map_err(io_err(path))?;
    for row in values.axis_iter(Axis(0)) {
        line.clear();
        for (c, v) in row.iter().enumerate() {
            if c > 0 {
                line.push(',');
            }
            write!(line, "{v}").unwrap();
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

const SCALAR_COLUMNS: [&str; 4] = ["tau", "c_sq", "eta", "sigma_sq"];

/// One row per kept draw: `iteration, beta_<j>..., tau, c_sq, eta, sigma_sq`
/// with 1-based coordinate labels. Values use shortest round-trip formatting.
pub fn write_chains(store: &ChainStore, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut headers = vec!["iteration".to_string()];
    headers.extend(store.beta_index.iter().map(|j| format!("beta_{}", j + 1)));
    headers.extend(SCALAR_COLUMNS.iter().map(|s| s.to_string()));
    let k = store.n_kept();
    let mut values = Array2::zeros((k, headers.len()));
    for i in 0..k {
        let mut row = values.row_mut(i);
        row[0] = store.iterations[i] as f64;
        for (c, v) in store.beta_draws.row(i).iter().enumerate() {
            row[1 + c] = *v;
        }
        let base = 1 + store.beta_index.len();
        row[base] = store.tau_draws[i];
        row[base + 1] = store.c_sq_draws[i];
        row[base + 2] = store.eta_draws[i];
        row[base + 3] = store.sigma_sq_draws[i];
    }
    write_table(path, &headers, &values)
}

/// Reads a chain file written by [`write_chains`]. `p` defaults to the largest
/// stored coordinate; `lambda_final` and `active_sizes` are not part of the
/// file and come back empty.
pub fn read_chains(path: impl AsRef<Path>, p: Option<usize>) -> Result<ChainStore> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let bad = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let h = &table.headers;
    if h.len() < 5 || h[0] != "iteration" || h[h.len() - 4..] != SCALAR_COLUMNS {
        return Err(bad("not a chain file (unexpected header)".into()));
    }
    let beta_headers = &h[1..h.len() - 4];
    let mut beta_index = Vec::with_capacity(beta_headers.len());
    for name in beta_headers {
        let j: usize = name
            .strip_prefix("beta_")
            .and_then(|s| s.parse().ok())
            .filter(|&j| j >= 1)
            .ok_or_else(|| bad(format!("bad coefficient column `{name}`")))?;
        beta_index.push(j - 1);
    }
    if beta_index.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("coefficient columns are not in ascending order".into()));
    }
    let inferred = beta_index.last().map_or(0, |j| j + 1);
    let p = p.unwrap_or(inferred);
    if p < inferred {
        return Err(bad(format!("p = {p} but file stores coordinate {inferred}")));
    }
    let v = &table.values;
    let nb = beta_index.len();
    let col = |c: usize| v.column(c).to_vec();
    let store = ChainStore {
        p,
        iterations: v.column(0).iter().map(|x| *x as usize).collect(),
        beta_draws: v.slice(ndarray::s![.., 1..1 + nb]).to_owned(),
        beta_index,
        tau_draws: col(1 + nb),
        c_sq_draws: col(2 + nb),
        eta_draws: col(3 + nb),
        sigma_sq_draws: col(4 + nb),
        lambda_final: Vec::new(),
        active_sizes: Vec::new(),
    };
    store.validate()?;
    Ok(store)
}

fn join(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 20);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{v}").unwrap();
    }
    s
}

/// A report as written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportFile {
    pub report: SelectionReport,
    pub stats: Option<Standardization>,
    pub metrics: Option<Metrics>,
}

/// Writes a sectioned `key = value` document: selection settings and the
/// selected set, optional metrics, optional standardization statistics, the
/// full coefficient vectors, and one block per selected coordinate.
pub fn write_report(
    path: impl AsRef<Path>,
    report: &SelectionReport,
    stats: Option<&Standardization>,
    metrics: Option<&Metrics>,
) -> Result<()> {
    let path = path.as_ref();
    let mut doc = String::new();
    let selected: Vec<String> = report.selected.iter().map(|j| (j + 1).to_string()).collect();
    writeln!(doc, "[selection]").unwrap();
    writeln!(doc, "p = {}", report.p()).unwrap();
    writeln!(doc, "threshold_delta = {}", report.threshold_delta).unwrap();
    writeln!(doc, "prob_cutoff = {}", report.prob_cutoff).unwrap();
    writeln!(doc, "n_selected = {}", report.selected.len()).unwrap();
    writeln!(doc, "selected = {}", selected.join(",")).unwrap();
    if let Some(m) = metrics {
        writeln!(doc, "\n[metrics]").unwrap();
        for (name, v) in Metrics::NAMES.iter().zip(m.values()) {
            writeln!(doc, "{name} = {v}").unwrap();
        }
    }
    if let Some(s) = stats {
        writeln!(doc, "\n[standardization]").unwrap();
        writeln!(doc, "y_mean = {}", s.y_mean).unwrap();
        writeln!(doc, "y_sd = {}", s.y_sd).unwrap();
        writeln!(doc, "col_means = {}", join(&s.col_means)).unwrap();
        writeln!(doc, "col_sds = {}", join(&s.col_sds)).unwrap();
    }
    writeln!(doc, "\n[coefficients]").unwrap();
    writeln!(doc, "post_mean = {}", join(&report.post_mean)).unwrap();
    writeln!(doc, "ci_lower = {}", join(&report.ci_lower)).unwrap();
    writeln!(doc, "ci_upper = {}", join(&report.ci_upper)).unwrap();
    writeln!(doc, "sel_prob = {}", join(&report.sel_prob)).unwrap();
    for &j in &report.selected {
        writeln!(doc, "\n[coefficient {}]", j + 1).unwrap();
        writeln!(doc, "post_mean = {}", report.post_mean[j]).unwrap();
        writeln!(doc, "ci_lower = {}", report.ci_lower[j]).unwrap();
        writeln!(doc, "ci_upper = {}", report.ci_upper[j]).unwrap();
        writeln!(doc, "sel_prob = {}", report.sel_prob[j]).unwrap();
        if let Some(s) = stats {
            writeln!(doc, "raw_effect = {}", report.post_mean[j] * s.y_sd / s.col_sds[j]).unwrap();
        }
    }
    let mut w = create_writer(path)?;
    w.write_all(doc.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Reads a document written by [`write_report`].
pub fn read_report(path: impl AsRef<Path>) -> Result<ReportFile> {
    let path = path.as_ref();
    let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
    let mut current = String::new();
    for (i, line) in BufReader::new(open_reader(path)?).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_error(path, i + 1, 1, "expected `key = value`"))?;
        sections
            .entry(current.clone())
            .or_default()
            .insert(key.trim().to_string(), (i + 1, value.trim().to_string()));
    }
    let path_buf: PathBuf = path.to_path_buf();
    let missing = |what: &str| Error::Format {
        path: path_buf.clone(),
        message: format!("missing `{what}`"),
    };
    let get = |section: &str, key: &str| -> Result<&(usize, String)> {
        sections
            .get(section)
            .and_then(|s| s.get(key))
            .ok_or_else(|| missing(&format!("{section}.{key}")))
    };
    let scalar = |section: &str, key: &str| -> Result<f64> {
        let (line, v) = get(section, key)?;
        v.parse()
            .map_err(|_| parse_error(path, *line, 1, format!("`{v}` is not a number")))
    };
    let list = |section: &str, key: &str| -> Result<Vec<f64>> {
        let (line, v) = get(section, key)?;
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',')
            .enumerate()
            .map(|(c, s)| {
                s.trim()
                    .parse()
                    .map_err(|_| parse_error(path, *line, c + 1, format!("`{s}` is not a number")))
            })
            .collect()
    };

    let p = scalar("selection", "p")? as usize;
    let (line, sel) = get("selection", "selected")?;
    let selected: Vec<usize> = if sel.is_empty() {
        Vec::new()
    } else {
        sel.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&j| (1..=p).contains(&j))
                    .map(|j| j - 1)
                    .ok_or_else(|| parse_error(path, *line, 1, format!("bad index `{s}`")))
            })
            .collect::<Result<_>>()?
    };
    let report = SelectionReport {
        post_mean: list("coefficients", "post_mean")?,
        ci_lower: list("coefficients", "ci_lower")?,
        ci_upper: list("coefficients", "ci_upper")?,
        sel_prob: list("coefficients", "sel_prob")?,
        selected,
        threshold_delta: scalar("selection", "threshold_delta")?,
        prob_cutoff: scalar("selection", "prob_cutoff")?,
    };
    if [&report.post_mean, &report.ci_lower, &report.ci_upper, &report.sel_prob]
        .iter()
        .any(|v| v.len() != p)
    {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("coefficient vectors must have length p = {p}"),
        });
    }
    let stats = if sections.contains_key("standardization") {
        let s = Standardization {
            col_means: list("standardization", "col_means")?,
            col_sds: list("standardization", "col_sds")?,
            y_mean: scalar("standardization", "y_mean")?,
            y_sd: scalar("standardization", "y_sd")?,
        };
        if s.col_means.len() != p || s.col_sds.len() != p {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: "standardization vectors must have length p".into(),
            });
        }
        Some(s)
    } else {
        None
    };
    let metrics = if sections.contains_key("metrics") {
        Some(Metrics {
            rmse_beta: scalar("metrics", "rmse_beta")?,
            mse_y: scalar("metrics", "mse_y")?,
            tpr: scalar("metrics", "tpr")?,
            fpr: scalar("metrics", "fpr")?,
            mcc: scalar("metrics", "mcc")?,
            fdr: scalar("metrics", "fdr")?,
            runtime_sec: scalar("metrics", "runtime_sec")?,
        })
    } else {
        None
    };
    Ok(ReportFile {
        report,
        stats,
        metrics,
    })
}
