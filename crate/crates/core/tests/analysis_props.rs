use bugs_core::analysis::{
    effective_sample_size, gelman_rubin, predict, raw_coefficients, summarize, Confusion,
};
use bugs_core::data::{apply_standardization, generate_scenario_raw, standardize};
use bugs_core::samplers::ChainStore;
use ndarray::Array2;
use proptest::prelude::*;

fn store(draws: Array2<f64>) -> ChainStore {
    let (k, p) = draws.dim();
    ChainStore {
        p,
        iterations: (0..k).collect(),
        beta_index: (0..p).collect(),
        beta_draws: draws,
        tau_draws: vec![1.0; k],
        c_sq_draws: vec![1.0; k],
        eta_draws: vec![0.0; k],
        sigma_sq_draws: vec![1.0; k],
        lambda_final: vec![1.0; p],
        active_sizes: Vec::new(),
    }
}

proptest! {
    #[test]
    fn raising_thresholds_never_adds(
        vals in prop::collection::vec(-0.2f64..0.2, 40),
        d1 in 0.0f64..0.1, dd in 0.0f64..0.1,
        c1 in 0.0f64..1.0, dc in 0.0f64..0.5,
    ) {
        let s = store(Array2::from_shape_vec((10, 4), vals).unwrap());
        let base = summarize(&s, d1, c1).unwrap();
        let stricter_delta = summarize(&s, d1 + dd, c1).unwrap();
        let stricter_cut = base.with_cutoff((c1 + dc).min(1.0));
        prop_assert!(stricter_delta.selected_set().is_subset(&base.selected_set()));
        prop_assert!(stricter_cut.selected_set().is_subset(&base.selected_set()));
        prop_assert!(base.sel_prob.iter().all(|&q| (0.0..=1.0).contains(&q)));
        for j in 0..4 {
            prop_assert!(base.ci_lower[j] <= base.ci_upper[j]);
        }
    }

    #[test]
    fn confusion_identities(sel in prop::collection::btree_set(0usize..30, 0..30), sup in prop::collection::btree_set(0usize..30, 1..29)) {
        let selected: Vec<usize> = sel.iter().copied().collect();
        let support: Vec<usize> = sup.iter().copied().collect();
        let c = Confusion::from_selection(&selected, &support, 30);
        prop_assert_eq!(c.tp + c.fp + c.fn_ + c.tn, 30);
        if c.tp + c.fp > 0 {
            prop_assert!((c.fdr() + c.precision() - 1.0).abs() < 1e-12);
        }
        prop_assert!((-1.0..=1.0).contains(&c.mcc()));
        prop_assert!((0.0..=1.0).contains(&c.tpr()) && (0.0..=1.0).contains(&c.fpr()));
        prop_assert_eq!((c.mcc() - 1.0).abs() < 1e-12, sel == sup);
    }
}

#[test]
fn raw_effects_reproduce_standardized_predictions() {
    let (x, y, _) = generate_scenario_raw(40, 12, 0.2, 5).unwrap();
    let data = standardize(x.clone(), y).unwrap();
    let mut draws = Array2::zeros((3, 12));
    for j in 0..12 {
        draws.column_mut(j).fill(0.05 * j as f64 - 0.2);
    }
    let report = summarize(&store(draws), 0.01, 0.5).unwrap();
    let y_hat = predict(&report, &x, data.stats()).unwrap();
    let (intercept, slopes) = raw_coefficients(&report, data.stats());
    let xs = apply_standardization(&x, data.stats()).unwrap();
    let s = data.stats();
    for i in 0..40 {
        let raw: f64 = intercept + (0..12).map(|j| slopes[j] * x[[i, j]]).sum::<f64>();
        let std: f64 = (0..12).map(|j| xs[[i, j]] * report.post_mean[j]).sum::<f64>() * s.y_sd + s.y_mean;
        assert!((raw - y_hat[i]).abs() < 1e-9);
        assert!((std - y_hat[i]).abs() < 1e-9);
    }
}

#[test]
fn diagnostics_on_white_noise_chains() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let chains: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let r = gelman_rubin(&chains).unwrap();
    assert!((0.99..=1.01).contains(&r), "R-hat {r}");
    let ess = effective_sample_size(&chains[0]).unwrap();
    assert!(ess >= 0.8 * 5000.0, "ESS {ess}");
}
