//! The fast Gaussian draw against a dense `p x p` computation.

use std::time::Instant;

use bugs_core::linalg::{sample_gaussian_conditional, weighted_gram_plus_identity};
use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_problem(n: usize, p: usize, seed: u64) -> (Array2<f64>, Array1<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
    let y = Array1::from_shape_fn(n, |_| rng.sample::<f64, _>(StandardNormal));
    let d = (0..p).map(|_| 0.05 + 2.0 * rng.random::<f64>()).collect();
    (x, y, d)
}

/// Mean and covariance of the target Gaussian, `(X'X + D^-1)^-1 X'y` and
/// `sigma^2 (X'X + D^-1)^-1`, by explicit inversion.
fn dense_moments(x: &Array2<f64>, y: &Array1<f64>, d: &[f64], sigma_sq: f64) -> (DVector<f64>, DMatrix<f64>) {
    let (n, p) = x.dim();
    let xm = DMatrix::from_fn(n, p, |i, j| x[[i, j]]);
    let yv = DVector::from_iterator(n, y.iter().copied());
    let mut prec = xm.transpose() * &xm;
    for j in 0..p {
        prec[(j, j)] += 1.0 / d[j];
    }
    let inv = prec.try_inverse().expect("precision is invertible");
    let mean = &inv * xm.transpose() * yv;
    (mean, inv * sigma_sq)
}

#[test]
fn woodbury_mean_matches_dense_inverse() {
    for (k, &(n, p)) in [(10, 40), (30, 30), (50, 12), (7, 50)].iter().enumerate() {
        let (x, y, d) = random_problem(n, p, 100 + k as u64);
        let (mean, _) = dense_moments(&x, &y, &d, 1.0);
        // D X' (X D X' + I)^-1 y
        let m = weighted_gram_plus_identity(&x, &d);
        let mm = DMatrix::from_fn(n, n, |i, j| m[[i, j]]);
        let w = mm.cholesky().unwrap().solve(&DVector::from_iterator(n, y.iter().copied()));
        for j in 0..p {
            let fast: f64 = d[j] * (0..n).map(|i| x[[i, j]] * w[i]).sum::<f64>();
            let scale = mean[j].abs().max(1e-3);
            assert!((fast - mean[j]).abs() / scale < 1e-6, "coordinate {j}: {fast} vs {}", mean[j]);
        }
    }
}

#[test]
fn draws_match_dense_mean_and_covariance() {
    let (n, p, sigma_sq) = (20, 5, 0.7);
    let (x, y, d) = random_problem(n, p, 7);
    let (mean, cov) = dense_moments(&x, &y, &d, sigma_sq);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draws = 20_000;
    let mut sum = vec![0.0; p];
    let mut samples = Vec::with_capacity(draws);
    for _ in 0..draws {
        let b = sample_gaussian_conditional(&x, &y, &d, sigma_sq, &mut rng).unwrap();
        for j in 0..p {
            sum[j] += b[j];
        }
        samples.push(b);
    }
    let nd = draws as f64;
    let emp_mean: Vec<f64> = sum.iter().map(|s| s / nd).collect();
    for j in 0..p {
        let se = (cov[(j, j)] / nd).sqrt();
        assert!((emp_mean[j] - mean[j]).abs() < 3.0 * se, "mean {j}");
    }
    for a in 0..p {
        for b in 0..p {
            let c: f64 = samples
                .iter()
                .map(|s| (s[a] - emp_mean[a]) * (s[b] - emp_mean[b]))
                .sum::<f64>()
                / (nd - 1.0);
            // Var of a sample covariance of Gaussians: (S_ab^2 + S_aa S_bb) / N
            let se = ((cov[(a, b)].powi(2) + cov[(a, a)] * cov[(b, b)]) / nd).sqrt();
            assert!((c - cov[(a, b)]).abs() < 3.0 * se, "cov ({a},{b}): {c} vs {}", cov[(a, b)]);
        }
    }
}

#[test]
fn cost_grows_at_most_linearly_in_p() {
    let n = 100;
    let time = |p: usize| {
        let (x, y, d) = random_problem(n, p, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        sample_gaussian_conditional(&x, &y, &d, 1.0, &mut rng).unwrap();
        let start = Instant::now();
        for _ in 0..5 {
            sample_gaussian_conditional(&x, &y, &d, 1.0, &mut rng).unwrap();
        }
        start.elapsed().as_secs_f64()
    };
    let (t1, t2) = (time(2000), time(4000));
    assert!(t2 / t1 < 3.0, "doubling p took {:.2}x longer", t2 / t1);
}
