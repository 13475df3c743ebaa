use std::collections::BTreeSet;

use bugs_core::active::{run_mcmc_active, ActiveSetBuilder, ActiveSetConfig};
use bugs_core::data::generate_scenario;
use bugs_core::model::{guidance_scores, guidance_statistics, GuidanceConfig, Hyperparameters};
use bugs_core::samplers::{run_mcmc, run_sampler, BetaStorage, McmcConfig};

fn problem(p: usize) -> (bugs_core::model::Dataset, bugs_core::model::GuidanceVector) {
    let (data, _) = generate_scenario(60, p, 0.0, 17).unwrap();
    let g = guidance_statistics(&guidance_scores(&data).unwrap(), GuidanceConfig::default()).unwrap();
    (data, g)
}

fn cfg(seed: u64) -> McmcConfig {
    McmcConfig {
        n_iter: 80,
        n_burnin: 20,
        seed,
        ..Default::default()
    }
}

fn active(k: usize) -> ActiveSetConfig {
    ActiveSetConfig {
        guidance_budget: k,
        coef_threshold: 1e-4,
        max_active: 0,
        lambda_baseline: 1e-3,
    }
}

#[test]
fn full_budget_reproduces_full_sampler() {
    let (data, g) = problem(40);
    let h = Hyperparameters::default();
    let full = run_mcmc(&data, &g, &h, &cfg(1)).unwrap();
    let act = run_mcmc_active(&data, &g, &h, &cfg(1), &active(40)).unwrap();
    assert_eq!(full.beta_draws, act.beta_draws);
    assert_eq!(full.tau_draws, act.tau_draws);
    assert_eq!(full.eta_draws, act.eta_draws);
    assert!(act.active_sizes.iter().all(|&s| s == 40));
}

#[test]
fn guidance_members_always_active_and_others_pinned() {
    let (data, g) = problem(120);
    let acfg = active(15);
    let top: BTreeSet<usize> = ActiveSetBuilder::new(&g, &acfg)
        .unwrap()
        .guidance_indices()
        .iter()
        .copied()
        .collect();
    assert_eq!(top.len(), 15);
    let mut seen = 0;
    run_sampler(&data, &g, &Hyperparameters::default(), &cfg(2), Some(&acfg), |view| {
        let set: BTreeSet<usize> = view.active_set.unwrap().iter().copied().collect();
        assert!(top.is_subset(&set));
        for j in 0..120 {
            if !set.contains(&j) {
                assert_eq!(view.state.lambda[j], 1e-3);
            }
        }
        seen += 1;
    })
    .unwrap();
    assert_eq!(seen, 80);
}

#[test]
fn cap_bounds_active_size() {
    let (data, g) = problem(120);
    let acfg = ActiveSetConfig {
        max_active: 25,
        ..active(15)
    };
    let store = run_mcmc_active(&data, &g, &Hyperparameters::default(), &cfg(3), &acfg).unwrap();
    assert_eq!(store.active_sizes.len(), 80);
    assert!(store.active_sizes.iter().all(|&s| (15..=25).contains(&s)));
}

#[test]
fn sparse_storage_zero_fills_outside_active_set() {
    let (data, g) = problem(120);
    let h = Hyperparameters::default();
    let dense = run_mcmc_active(&data, &g, &h, &cfg(4), &active(15)).unwrap();
    let sparse_cfg = McmcConfig {
        beta_storage: BetaStorage::Active,
        ..cfg(4)
    };
    let sparse = run_mcmc_active(&data, &g, &h, &sparse_cfg, &active(15)).unwrap();
    assert!(sparse.beta_index.len() <= 120);
    assert_eq!(sparse.tau_draws, dense.tau_draws);
    for (c, &j) in sparse.beta_index.iter().enumerate() {
        for i in 0..sparse.n_kept() {
            let v = sparse.beta_draws[[i, c]];
            assert!(v == 0.0 || v == dense.beta_draws[[i, j]]);
        }
    }
}
