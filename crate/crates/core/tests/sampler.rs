use bugs_core::data::generate_scenario;
use bugs_core::model::{
    effective_variance, guidance_scores, guidance_statistics, GuidanceConfig, GuidanceVector,
    Hyperparameters, ModelState,
};
use bugs_core::samplers::{run_mcmc, run_sampler, sigma_sq_posterior, update_sigma_sq, McmcConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, InverseGamma};

fn small_problem() -> (bugs_core::model::Dataset, GuidanceVector) {
    let (data, _) = generate_scenario(40, 30, 0.0, 9).unwrap();
    let g = guidance_statistics(&guidance_scores(&data).unwrap(), GuidanceConfig::default()).unwrap();
    (data, g)
}

fn short(seed: u64) -> McmcConfig {
    McmcConfig {
        n_iter: 60,
        n_burnin: 10,
        thin: 1,
        seed,
        ..Default::default()
    }
}

#[test]
fn thinning_bookkeeping() {
    let (data, g) = small_problem();
    let cfg = McmcConfig {
        n_iter: 11,
        n_burnin: 1,
        thin: 5,
        ..short(0)
    };
    let store = run_mcmc(&data, &g, &Hyperparameters::default(), &cfg).unwrap();
    assert_eq!(store.n_kept(), 2);
    assert_eq!(store.beta_draws.dim(), (2, 30));
    assert_eq!(store.tau_draws.len(), 2);
    assert_eq!(store.lambda_final.len(), 30);
}

#[test]
fn same_seed_same_chain() {
    let (data, g) = small_problem();
    let h = Hyperparameters::default();
    let a = run_mcmc(&data, &g, &h, &short(4)).unwrap();
    let b = run_mcmc(&data, &g, &h, &short(4)).unwrap();
    let c = run_mcmc(&data, &g, &h, &short(5)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.beta_draws, c.beta_draws);
}

#[test]
fn fixed_eta_matches_zero_guidance() {
    let (data, g) = small_problem();
    let h = Hyperparameters::default();
    let cfg = McmcConfig {
        fix_eta_zero: true,
        ..short(2)
    };
    let guided = run_mcmc(&data, &g, &h, &cfg).unwrap();
    let zero = GuidanceVector::uninformative(data.p(), GuidanceConfig::default());
    let flat = run_mcmc(&data, &zero, &h, &cfg).unwrap();
    assert_eq!(guided, flat);
    assert!(guided.eta_draws.iter().all(|&e| e == 0.0));
}

#[test]
fn every_sweep_stays_in_support() {
    let (data, g) = small_problem();
    let mut sweeps = 0;
    run_sampler(&data, &g, &Hyperparameters::default(), &short(3), None, |view| {
        let s = view.state;
        assert_eq!(s.invalid_component(), None, "iteration {}", view.iteration);
        assert!(s.lambda.iter().all(|&l| l > 0.0));
        assert!(s.tau > 0.0 && s.c_sq > 0.0 && s.sigma_sq > 0.0 && s.eta >= 0.0);
        sweeps += 1;
    })
    .unwrap();
    assert_eq!(sweeps, 60);
}

#[test]
fn fixed_eta_states_use_horseshoe_variances() {
    let (data, g) = small_problem();
    let cfg = McmcConfig {
        fix_eta_zero: true,
        ..short(6)
    };
    run_sampler(&data, &g, &Hyperparameters::default(), &cfg, None, |view| {
        let s = view.state;
        for (k, &l) in s.effective_variances(&g).iter().zip(&s.lambda) {
            let a = s.tau * s.tau * l * l;
            let rhs = s.c_sq * a / (s.c_sq + a);
            assert!((k - rhs).abs() <= 1e-12 * rhs);
        }
    })
    .unwrap();
}

#[test]
fn sigma_sq_update_matches_inverse_gamma() {
    let (data, g) = small_problem();
    let mut state = ModelState::initial(data.p(), false);
    state.beta[0] = 0.5;
    state.beta[3] = -0.2;
    let h = Hyperparameters::default();
    let k2: Vec<f64> = (0..data.p())
        .map(|j| effective_variance(g.values()[j], state.lambda[j], state.tau, state.c_sq, state.eta))
        .collect();
    let (shape, rate) = sigma_sq_posterior(&state, &data, &k2, &h).unwrap();
    let dist = InverseGamma::new(shape, rate).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut draws: Vec<f64> = (0..50_000)
        .map(|_| update_sigma_sq(&state, &data, &k2, &h, &mut rng).unwrap())
        .collect();
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let ks = draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = dist.cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.02, "KS statistic {ks}");
}

#[test]
fn scenario_signals_recovered() {
    let (data, truth) = generate_scenario(100, 200, 0.0, 21).unwrap();
    let g = guidance_statistics(&guidance_scores(&data).unwrap(), GuidanceConfig::default()).unwrap();
    let cfg = McmcConfig {
        n_iter: 2000,
        n_burnin: 500,
        seed: 1,
        ..Default::default()
    };
    let store = run_mcmc(&data, &g, &Hyperparameters::default(), &cfg).unwrap();
    let std_truth = truth.standardized_beta(data.stats());
    for j in 0..10 {
        let col = store.beta_column(j).unwrap();
        let mean = col.sum() / col.len() as f64;
        assert!((mean - std_truth[j]).abs() < 0.3, "signal {j}: {mean} vs {}", std_truth[j]);
    }
}
