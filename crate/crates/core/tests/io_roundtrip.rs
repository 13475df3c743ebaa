use bugs_core::analysis::{compute_metrics, summarize};
use bugs_core::data::{
    generate_scenario, generate_scenario_raw, read_chains, read_dataset, read_report, read_table,
    write_chains, write_report, write_table, ResponseColumn,
};
use bugs_core::model::{guidance_scores, guidance_statistics, GuidanceConfig, Hyperparameters};
use bugs_core::samplers::{run_mcmc, BetaStorage, ChainStore, McmcConfig};
use bugs_core::Error;
use ndarray::{concatenate, Axis};

fn chain(storage: BetaStorage) -> (ChainStore, bugs_core::model::Dataset, bugs_core::data::SyntheticTruth) {
    let (data, truth) = generate_scenario(30, 25, 0.3, 2).unwrap();
    let g = guidance_statistics(&guidance_scores(&data).unwrap(), GuidanceConfig::default()).unwrap();
    let cfg = McmcConfig {
        n_iter: 40,
        n_burnin: 10,
        thin: 3,
        seed: 8,
        beta_storage: storage,
        ..Default::default()
    };
    (run_mcmc(&data, &g, &Hyperparameters::default(), &cfg).unwrap(), data, truth)
}

fn same_draws(a: &ChainStore, b: &ChainStore) {
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.beta_index, b.beta_index);
    for (x, y) in a.beta_draws.iter().zip(b.beta_draws.iter()) {
        assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
    }
    for (x, y) in [
        (&a.tau_draws, &b.tau_draws),
        (&a.c_sq_draws, &b.c_sq_draws),
        (&a.eta_draws, &b.eta_draws),
        (&a.sigma_sq_draws, &b.sigma_sq_draws),
    ] {
        assert_eq!(x, y);
    }
}

#[test]
fn chains_round_trip_plain_and_gzip() {
    let dir = tempfile::tempdir().unwrap();
    let (store, _, _) = chain(BetaStorage::All);
    for name in ["c.csv", "c.csv.gz"] {
        let path = dir.path().join(name);
        write_chains(&store, &path).unwrap();
        let back = read_chains(&path, Some(store.p)).unwrap();
        same_draws(&store, &back);
    }
}

#[test]
fn chain_header_layout() {
    let dir = tempfile::tempdir().unwrap();
    let (store, _, _) = chain(BetaStorage::All);
    let path = dir.path().join("c.csv");
    write_chains(&store, &path).unwrap();
    let t = read_table(&path).unwrap();
    assert_eq!(t.headers[0], "iteration");
    assert_eq!(t.headers[1], "beta_1");
    assert_eq!(t.headers[25], "beta_25");
    assert_eq!(&t.headers[26..], ["tau", "c_sq", "eta", "sigma_sq"]);
    assert_eq!(t.values.nrows(), store.n_kept());
}

#[test]
fn report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (store, data, truth) = chain(BetaStorage::All);
    let report = summarize(&store, 0.01, 0.5).unwrap();
    let metrics = compute_metrics(&report, &truth, &data, 1.25).unwrap();
    let path = dir.path().join("report.txt");
    write_report(&path, &report, Some(data.stats()), Some(&metrics)).unwrap();
    let back = read_report(&path).unwrap();
    assert_eq!(back.report, report);
    assert_eq!(back.stats.as_ref(), Some(data.stats()));
    assert_eq!(back.metrics, Some(metrics));

    write_report(&path, &report, None, None).unwrap();
    let bare = read_report(&path).unwrap();
    assert_eq!(bare.report, report);
    assert!(bare.stats.is_none() && bare.metrics.is_none());
}

#[test]
fn simulated_table_reads_back_as_same_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, _) = generate_scenario_raw(50, 12, 0.5, 4).unwrap();
    let mut headers: Vec<String> = (1..=12).map(|j| format!("x{j}")).collect();
    headers.push("y".into());
    let table = concatenate![Axis(1), x, y.clone().insert_axis(Axis(1))];
    let path = dir.path().join("d.csv");
    write_table(&path, &headers, &table).unwrap();
    let by_name = read_dataset(&path, &ResponseColumn::Name("y".into())).unwrap();
    let by_last = read_dataset(&path, &ResponseColumn::Last).unwrap();
    let by_index = read_dataset(&path, &ResponseColumn::Index(12)).unwrap();
    let direct = bugs_core::data::standardize(x, y).unwrap();
    assert_eq!(by_name.x(), direct.x());
    assert_eq!(by_name.y(), direct.y());
    assert_eq!(by_last.x(), by_index.x());
}

#[test]
fn bad_files_name_the_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "a,b,y\n1,2,3\n4,x,6\n").unwrap();
    match read_dataset(&path, &ResponseColumn::Last) {
        Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 2)),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        read_dataset(dir.path().join("missing.csv"), &ResponseColumn::Last),
        Err(Error::Io { .. })
    ));
}
