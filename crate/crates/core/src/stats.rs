//! Small statistical helpers shared by the Monte Carlo estimators.

use serde::{Deserialize, Serialize};

/// A binomial proportion with its standard error and a 95% interval.
///
/// The interval is the normal approximation when at least 30 successes and
/// 30 failures were observed, and the Wilson score interval otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub count: u64,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

const Z95: f64 = 1.959963984540054;

impl Proportion {
    pub fn new(count: u64, trials: u64) -> Self {
        assert!(trials > 0, "proportion over zero trials");
        assert!(count <= trials);
        let t = trials as f64;
        let p = count as f64 / t;
        let stderr = (p * (1.0 - p) / t).sqrt();
        let (ci_low, ci_high) = if count < 30 || trials - count < 30 {
            wilson_interval(count, trials, Z95)
        } else {
            ((p - Z95 * stderr).max(0.0), (p + Z95 * stderr).min(1.0))
        };
        Self {
            count,
            trials,
            estimate: p,
            stderr,
            ci_low,
            ci_high,
        }
    }
}

/// Wilson score interval for `count` successes in `trials`.
pub fn wilson_interval(count: u64, trials: u64, z: f64) -> (f64, f64) {
    let t = trials as f64;
    let p = count as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let centre = (p + z2 / (2.0 * t)) / denom;
    let half = z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Sample mean, unbiased variance and the standard errors of both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub mean_stderr: f64,
    pub variance_stderr: f64,
}

impl Moments {
    /// Two-pass computation in input order; the result depends only on the
    /// sequence of values.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "moments of an empty sample");
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let (m2, m4) = values.iter().fold((0.0, 0.0), |(m2, m4), &x| {
            let d = x - mean;
            (m2 + d * d, m4 + d * d * d * d)
        });
        let variance = if n > 1 { m2 / (nf - 1.0) } else { 0.0 };
        let mean_stderr = (variance / nf).sqrt();
        // Var(s²) ≈ (μ4 − σ⁴)/n for large n.
        let mu4 = m4 / nf;
        let sigma2 = m2 / nf;
        let variance_stderr = ((mu4 - sigma2 * sigma2).max(0.0) / nf).sqrt();
        Self {
            count: n as u64,
            mean,
            variance,
            mean_stderr,
            variance_stderr,
        }
    }
}
