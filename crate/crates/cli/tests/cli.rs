use std::path::Path;
use std::process::{Command, Output};

use bugs_core::data::{read_chains, read_report, read_table};

fn bugs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bugs")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = bugs(args);
    assert!(
        out.status.success(),
        "bugs {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn simulate_fit_predict_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--n", "120", "--p", "30", "--seed", "4", "--test-fraction", "0.25", "--out", p(&sim)]);
    for f in ["data.csv", "truth.txt", "train.csv", "test.csv", "config.txt"] {
        assert!(sim.join(f).exists(), "{f}");
    }
    assert_eq!(read_table(sim.join("test.csv")).unwrap().values.nrows(), 30);

    let fit = dir.path().join("fit");
    ok(&[
        "fit", "--input", p(&sim.join("train.csv")), "--truth", p(&sim.join("truth.txt")),
        "--iters", "1200", "--burnin", "300", "--chains", "2", "--seed", "1", "--out", p(&fit),
    ]);
    let rf = read_report(fit.join("report.txt")).unwrap();
    assert_eq!(rf.report.p(), 30);
    assert!(rf.stats.is_some() && rf.metrics.is_some());
    // the two largest signals are found
    assert!(rf.report.selected.contains(&0) && rf.report.selected.contains(&1));
    let chain = read_chains(fit.join("chains").join("chain_2.csv"), Some(30)).unwrap();
    assert_eq!(chain.n_kept(), 900);
    assert!(fit.join("metrics.csv").exists() && fit.join("diagnostics.csv").exists());

    let pred = dir.path().join("pred");
    ok(&["predict", "--input", p(&sim.join("test.csv")), "--report", p(&fit.join("report.txt")), "--out", p(&pred)]);
    let m = read_table(pred.join("prediction_metrics.csv")).unwrap();
    let r2 = m.values[[0, m.headers.iter().position(|h| h == "r2").unwrap()]];
    assert!(r2 > 0.8, "held-out R^2 {r2}");
    assert_eq!(read_table(pred.join("predictions.csv")).unwrap().values.nrows(), 30);

    let diag = dir.path().join("diag");
    ok(&["diagnose", "--input", p(&fit), "--params", "tau,sigma_sq,beta_1", "--out", p(&diag)]);
    let text = std::fs::read_to_string(diag.join("diagnostics.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "parameter,rhat,ess_chain_1,ess_chain_2");
    assert_eq!(lines.count(), 3);
}

#[test]
fn active_fit_with_compressed_sparse_chains() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--n", "80", "--p", "300", "--seed", "2", "--out", p(&sim)]);
    let fit = dir.path().join("fit");
    ok(&[
        "fit-active", "--input", p(&sim.join("data.csv")), "--iters", "400", "--burnin", "100",
        "--guidance-budget", "20", "--beta-storage", "active", "--compress", "--out", p(&fit),
    ]);
    let chain = read_chains(fit.join("chains").join("chain_1.csv.gz"), Some(300)).unwrap();
    assert!(chain.beta_index.len() < 300);
    assert!(chain.beta_index.len() >= 20);
}

#[test]
fn same_seed_same_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--n", "50", "--p", "20", "--seed", "9", "--out", p(&sim)]);
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&["fit", "--input", p(&sim.join("data.csv")), "--iters", "300", "--burnin", "50", "--seed", "5", "--out", p(&out)]);
        (
            std::fs::read(out.join("chains").join("chain_1.csv")).unwrap(),
            std::fs::read(out.join("report.txt")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# settings\nn = 40\np = 25\nseed = 3\n").unwrap();
    let out = dir.path().join("sim");
    ok(&["simulate", "--config", p(&cfg), "--p", "15", "--out", p(&out)]);
    let t = read_table(out.join("data.csv")).unwrap();
    assert_eq!(t.values.dim(), (40, 16));

    // the echoed settings reproduce the run
    let echo = out.join("config.txt");
    let text = std::fs::read_to_string(&echo).unwrap();
    assert!(text.contains("p = 15") && text.contains("n = 40"));
    let again = dir.path().join("again");
    ok(&["simulate", "--config", p(&echo), "--out", p(&again)]);
    assert_eq!(
        std::fs::read(out.join("data.csv")).unwrap(),
        std::fs::read(again.join("data.csv")).unwrap()
    );
}

#[test]
fn eta_fixed_zero_pins_guidance_strength() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--n", "50", "--p", "20", "--out", p(&sim)]);
    let fit = dir.path().join("fit");
    ok(&[
        "fit", "--input", p(&sim.join("data.csv")), "--iters", "200", "--burnin", "50",
        "--eta-fixed-zero", "--out", p(&fit),
    ]);
    let chain = read_chains(fit.join("chains").join("chain_1.csv"), Some(20)).unwrap();
    assert!(chain.eta_draws.iter().all(|&e| e == 0.0));
}

#[test]
fn benchmark_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    ok(&[
        "benchmark", "--replications", "2", "--n", "40", "--p", "30", "--iters", "200", "--burnin", "50",
        "--out", p(&out),
    ]);
    let t = std::fs::read_to_string(out.join("benchmark.csv")).unwrap();
    let rows: Vec<&str> = t.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("BUGS,") && rows[2].starts_with("BUGS-unguided,"));
    assert!(out.join("timing.csv").exists());
    assert_eq!(std::fs::read_to_string(out.join("replications.csv")).unwrap().lines().count(), 5);
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = bugs(&["fit", "--input", p(&dir.path().join("nope.csv")), "--out", p(dir.path())]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error"));

    let too_small = bugs(&["simulate", "--p", "5", "--out", p(dir.path())]);
    assert_eq!(too_small.status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b,y\n1,2,3\n4,x,6\n").unwrap();
    let out = bugs(&["fit", "--input", p(&bad), "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains('3') && msg.contains('2'), "{msg}");

    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(bugs(&["simulate", "--config", p(&cfg), "--out", p(dir.path())]).status.code(), Some(2));

    // clap usage errors keep clap's own code
    assert_eq!(bugs(&["fit", "--iters", "many"]).status.code(), Some(2));
    assert!(!bugs(&["frobnicate"]).status.success());
}
