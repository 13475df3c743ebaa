use std::path::PathBuf;

use bugs_core::data::{generate_scenario_raw, train_test_split, write_table, SyntheticTruth};
use ndarray::{concatenate, Array1, Array2, Axis};

use crate::files::write_truth;
use crate::{prepare_output, CliError, Settings};

pub struct SimulateOutput {
    pub data: PathBuf,
    pub truth: PathBuf,
    pub split: Option<(PathBuf, PathBuf)>,
}

fn write_xy(path: &PathBuf, x: &Array2<f64>, y: &Array1<f64>) -> Result<(), CliError> {
    let mut headers: Vec<String> = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
    headers.push("y".into());
    let table = concatenate![Axis(1), x.view(), y.view().insert_axis(Axis(1))];
    Ok(write_table(path, &headers, &table)?)
}

/// Writes `data.csv` (`x1..xp, y`), `truth.txt`, and with a positive
/// `test_fraction` also `train.csv` and `test.csv`.
pub fn simulate(s: &Settings) -> Result<SimulateOutput, CliError> {
    let (n, p, rho): (usize, usize, f64) = (s.get("n")?, s.get("p")?, s.get("rho")?);
    let seed = s.get("seed")?;
    let test_fraction: f64 = s.get("test_fraction")?;
    let (x, y, truth): (_, _, SyntheticTruth) = generate_scenario_raw(n, p, rho, seed)?;
    let out = prepare_output(s)?;
    let data = out.join("data.csv");
    write_xy(&data, &x, &y)?;
    let truth_path = out.join("truth.txt");
    write_truth(&truth_path, &truth)?;
    let split = if test_fraction > 0.0 {
        let sp = train_test_split(&x, &y, test_fraction, crate::stream_seed(seed, 1))?;
        let (train, test) = (out.join("train.csv"), out.join("test.csv"));
        write_xy(&train, &x.select(Axis(0), &sp.train_rows), &y.select(Axis(0), &sp.train_rows))?;
        write_xy(&test, &sp.test_x, &sp.test_y)?;
        Some((train, test))
    } else {
        None
    };
    println!("wrote {} ({n} x {}) and {}", data.display(), p + 1, truth_path.display());
    Ok(SimulateOutput {
        data,
        truth: truth_path,
        split,
    })
}
