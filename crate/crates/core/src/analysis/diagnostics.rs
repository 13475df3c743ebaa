use crate::error::{Error, Result};

const MIN_LEN: usize = 10;

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Split potential scale reduction factor of one scalar across chains.
///
/// Each chain is cut into two halves (the middle draw is dropped for odd
/// lengths); the result is `sqrt(((n-1)/n W + B/n) / W)` over the halves.
/// Returns 1.0 when the within-chain variance is zero.
pub fn gelman_rubin<C: AsRef<[f64]>>(chains: &[C]) -> Result<f64> {
    if chains.len() < 2 {
        return Err(Error::invalid("chains", "need at least two chains"));
    }
    let len = chains[0].as_ref().len();
    if chains.iter().any(|c| c.as_ref().len() != len) {
        return Err(Error::invalid("chains", "chains must have equal length"));
    }
    if len < MIN_LEN {
        return Err(Error::invalid("chains", format!("need at least {MIN_LEN} draws per chain")));
    }
    let half = len / 2;
    let mut halves = Vec::with_capacity(2 * chains.len());
    for c in chains {
        let c = c.as_ref();
        halves.push(&c[..half]);
        halves.push(&c[len - half..]);
    }
    let stats: Vec<(f64, f64)> = halves.iter().map(|h| mean_var(h)).collect();
    let w = stats.iter().map(|s| s.1).sum::<f64>() / stats.len() as f64;
    if !(w > 0.0) {
        return Ok(1.0);
    }
    let means: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let n = half as f64;
    let b = n * mean_var(&means).1;
    let var_plus = (n - 1.0) / n * w + b / n;
    Ok((var_plus / w).sqrt())
}

/// Effective sample size `N / (1 + 2 sum_t rho_t)`, with the autocorrelation
/// sum truncated at the first negative pair `rho_2k + rho_2k+1`.
/// A constant chain returns its length.
pub fn effective_sample_size(draws: &[f64]) -> Result<f64> {
    let n = draws.len();
    if n < MIN_LEN {
        return Err(Error::invalid("draws", format!("need at least {MIN_LEN} draws")));
    }
    let m = draws.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = draws.iter().map(|x| x - m).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let gamma0 = autocov(0);
    if !(gamma0 > 0.0) {
        return Ok(n as f64);
    }
    let mut pair_sum = 0.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (autocov(lag) + autocov(lag + 1)) / gamma0;
        if pair < 0.0 {
            break;
        }
        pair_sum += pair;
        lag += 2;
    }
    let tau = (2.0 * pair_sum - 1.0).max(1.0 / n as f64);
    Ok(n as f64 / tau)
}
