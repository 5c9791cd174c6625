//! Binomial proportions and Wilson score intervals.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959964;
/// Two-sided 99.9% normal quantile.
pub const Z_999: f64 = 3.290527;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub trials: u64,
    pub hits: u64,
}

impl Proportion {
    pub fn new(trials: u64, hits: u64) -> Self {
        assert!(hits <= trials, "{hits} hits out of {trials} trials");
        Self { trials, hits }
    }

    pub fn p_hat(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.hits as f64 / self.trials as f64
    }

    /// Binomial standard error at the observed proportion.
    pub fn std_error(&self) -> f64 {
        standard_deviation(self.p_hat(), self.trials)
    }

    /// Wilson score interval at normal quantile `z`, clamped so that
    /// `lo <= p_hat <= hi` holds in floating point.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        if self.trials == 0 {
            return (0.0, 1.0);
        }
        let n = self.trials as f64;
        let p = self.p_hat();
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        let lo = (centre - half).clamp(0.0, p);
        let hi = (centre + half).clamp(p, 1.0);
        (lo, hi)
    }

    pub fn contains(&self, z: f64, value: f64) -> bool {
        let (lo, hi) = self.wilson(z);
        lo <= value && value <= hi
    }
}

/// Standard deviation of the sample proportion for true proportion `p`.
pub fn standard_deviation(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Whether an estimate lies within `sigmas` standard deviations of `expected`,
/// measured with the binomial deviation at `expected`.
pub fn within_sigmas(estimate: &Proportion, expected: f64, sigmas: f64) -> bool {
    let sd = standard_deviation(expected, estimate.trials);
    (estimate.p_hat() - expected).abs() <= sigmas * sd
}
