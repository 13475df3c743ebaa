use bugs_core::data::{generate_scenario_raw, SCENARIO_COEFFICIENTS};

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn correlated_design_is_toeplitz() {
    let (n, p, rho) = (5000, 10, 0.5);
    let (x, _, _) = generate_scenario_raw(n, p, rho, 12).unwrap();
    let tol = 3.0 / (n as f64).sqrt();
    let cols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j).to_vec()).collect();
    for i in 0..p {
        let var = cols[i].iter().map(|v| v * v).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.06, "column {i} variance {var}");
        for j in i + 1..p {
            let expected = rho.powi((j - i) as i32);
            let r = corr(&cols[i], &cols[j]);
            assert!((r - expected).abs() < tol, "({i},{j}): {r} vs {expected}");
        }
    }
}

#[test]
fn noise_has_unit_variance() {
    for rho in [0.0, 0.5] {
        let (x, y, truth) = generate_scenario_raw(400, 30, rho, 3).unwrap();
        assert_eq!(&truth.beta0[..10], &SCENARIO_COEFFICIENTS);
        assert_eq!(truth.support, (0..10).collect::<Vec<_>>());
        let resid: Vec<f64> = (0..400)
            .map(|i| y[i] - (0..30).map(|j| x[[i, j]] * truth.beta0[j]).sum::<f64>())
            .collect();
        let m = resid.iter().sum::<f64>() / 400.0;
        let v = resid.iter().map(|r| (r - m).powi(2)).sum::<f64>() / 399.0;
        assert!((v - 1.0).abs() < 0.1 * 1.0 + 0.05, "residual variance {v}");
    }
}

#[test]
fn generation_is_deterministic_and_rejects_small_p() {
    let a = generate_scenario_raw(20, 15, 0.9, 1).unwrap();
    let b = generate_scenario_raw(20, 15, 0.9, 1).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert!(generate_scenario_raw(20, 5, 0.0, 1).is_err());
}
