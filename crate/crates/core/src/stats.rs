//! Binomial confidence intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Confidence level used throughout the estimators.
pub const LEVEL: f64 = 0.99;

/// Two-sided standard normal quantile for confidence `level`.
pub fn z_value(level: f64) -> f64 {
    assert!(level > 0.0 && level < 1.0);
    Normal::standard().inverse_cdf(0.5 + level / 2.0)
}

/// A proportion with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl Proportion {
    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// Wilson score interval for `successes` out of `trials` at `level`.
pub fn wilson(successes: u64, trials: u64, level: f64) -> Proportion {
    assert!(trials > 0, "Wilson interval needs at least one trial");
    assert!(successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = z_value(level);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Proportion {
        successes,
        trials,
        estimate: p,
        // exact at the boundary; rounding otherwise puts p just outside
        lower: (centre - half).clamp(0.0, p),
        upper: (centre + half).clamp(p, 1.0),
        level,
    }
}
