use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};

/// Tuning of the stepping-out and shrinkage procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceConfig {
    pub width: f64,
    pub max_stepout: usize,
    pub max_shrink: usize,
}

impl SliceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::invalid("slice width", "must be positive and finite"));
        }
        if self.max_stepout < 1 {
            return Err(Error::invalid("max_stepout", "must be at least 1"));
        }
        if self.max_shrink < 1 {
            return Err(Error::invalid("max_shrink", "must be at least 1"));
        }
        Ok(())
    }
}

impl Default for SliceConfig {
    fn default() -> Self {
        SliceConfig {
            width: 1.0,
            max_stepout: 50,
            max_shrink: 100,
        }
    }
}

/// One stepping-out/shrinkage slice update of `x0` targeting `exp(log_density)`.
pub fn slice_sample<F, R>(log_density: F, x0: f64, cfg: &SliceConfig, rng: &mut R) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    slice_sample_bounded(log_density, x0, f64::NEG_INFINITY, cfg, rng)
}

/// Slice update on `[lower, inf)`. The left edge of the bracketing interval is
/// clamped at `lower` and the density is never evaluated below it.
///
/// If shrinkage runs out of attempts the current point is returned, which
/// keeps the target invariant.
pub fn slice_sample_bounded<F, R>(
    mut log_density: F,
    x0: f64,
    lower: f64,
    cfg: &SliceConfig,
    rng: &mut R,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let f0 = log_density(x0);
    if !f0.is_finite() || x0 < lower {
        return Err(Error::InvalidSliceStart(f0));
    }
    let level = f0 - rng.sample::<f64, _>(Exp1);

    let w = cfg.width;
    let mut left = x0 - w * rng.random::<f64>();
    let mut right = left + w;
    let mut steps_left = (cfg.max_stepout as f64 * rng.random::<f64>()) as usize;
    let mut steps_right = cfg.max_stepout - 1 - steps_left.min(cfg.max_stepout - 1);
    while steps_left > 0 && left > lower && log_density(left) > level {
        left -= w;
        steps_left -= 1;
    }
    while steps_right > 0 && log_density(right) > level {
        right += w;
        steps_right -= 1;
    }
    if left < lower {
        left = lower;
    }

    for _ in 0..cfg.max_shrink {
        let x1 = left + rng.random::<f64>() * (right - left);
        if log_density(x1) > level {
            return Ok(x1);
        }
        if x1 < x0 {
            left = x1;
        } else {
            right = x1;
        }
    }
    Ok(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
    }

    #[test]
    fn standard_normal_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let cfg = SliceConfig::default();
        let mut x = 0.0;
        let draws: Vec<f64> = (0..50_000)
            .map(|_| {
                x = slice_sample(|v| -0.5 * v * v, x, &cfg, &mut rng).unwrap();
                x
            })
            .collect();
        let (m, v) = moments(&draws);
        assert!(m.abs() < 0.03, "mean {m}");
        assert!((0.94..=1.06).contains(&v), "variance {v}");
    }

    #[test]
    fn shifted_normal_found_from_far_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = SliceConfig::default();
        let mut x = 0.0;
        let draws: Vec<f64> = (0..1000)
            .map(|_| {
                x = slice_sample(|v| -0.5 * (v - 10.0).powi(2), x, &cfg, &mut rng).unwrap();
                x
            })
            .collect();
        let (m, _) = moments(&draws);
        assert!((9.7..=10.3).contains(&m), "mean {m}");
    }

    #[test]
    fn flat_target_stays_inside_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = SliceConfig {
            width: 0.5,
            max_stepout: 4,
            max_shrink: 10,
        };
        let mut x = 0.0;
        for _ in 0..1000 {
            let next = slice_sample(|_| 0.0, x, &cfg, &mut rng).unwrap();
            assert!(next.is_finite());
            assert!((next - x).abs() <= cfg.width * cfg.max_stepout as f64);
            x = next;
        }
    }

    #[test]
    fn non_finite_start_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = SliceConfig::default();
        let r = slice_sample(|v| if v < 1.0 { f64::NEG_INFINITY } else { 0.0 }, 0.0, &cfg, &mut rng);
        assert!(matches!(r, Err(Error::InvalidSliceStart(_))));
    }

    #[test]
    fn bounded_half_normal() {
        // half-normal on [0, inf): mean sqrt(2/pi)
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let cfg = SliceConfig::default();
        let mut x = 0.5;
        let mut sum = 0.0;
        let n = 40_000;
        for _ in 0..n {
            x = slice_sample_bounded(|v| -0.5 * v * v, x, 0.0, &cfg, &mut rng).unwrap();
            assert!(x >= 0.0);
            sum += x;
        }
        let mean = sum / n as f64;
        assert!((mean - (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn config_validation() {
        assert!(SliceConfig::default().validate().is_ok());
        let bad = SliceConfig {
            width: 0.0,
            ..SliceConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
