use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{Moments, Proportion};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub theory_value: Option<f64>,
    /// Short description of the reference value.
    pub theory_ref: String,
}

impl SummaryStats {
    pub fn proportion(p: &Proportion) -> Self {
        Self {
            estimate: p.estimate,
            stderr: p.stderr,
            trials: p.trials,
            theory_value: None,
            theory_ref: String::new(),
        }
    }

    pub fn mean(m: &Moments) -> Self {
        Self {
            estimate: m.mean,
            stderr: m.mean_stderr,
            trials: m.count,
            theory_value: None,
            theory_ref: String::new(),
        }
    }

    pub fn variance(m: &Moments) -> Self {
        Self {
            estimate: m.variance,
            stderr: m.variance_stderr,
            trials: m.count,
            theory_value: None,
            theory_ref: String::new(),
        }
    }

    pub fn exact(value: f64, trials: u64) -> Self {
        Self {
            estimate: value,
            stderr: 0.0,
            trials,
            theory_value: None,
            theory_ref: String::new(),
        }
    }

    pub fn with_theory(mut self, value: f64, reference: &str) -> Self {
        self.theory_value = Some(value);
        self.theory_ref = reference.to_string();
        self
    }

    /// `|estimate − theory| ≤ k·stderr + slack`.
    pub fn within(&self, k: f64, slack: f64) -> bool {
        self.theory_value
            .is_some_and(|t| (self.estimate - t).abs() <= k * self.stderr + slack)
    }
}

/// One CSV row: a statistic at matrix size `n` and, where relevant, a scale
/// parameter `epsilon` (ε, τ or a norm budget).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub n: usize,
    pub epsilon: Option<f64>,
    pub statistic: String,
    pub stats: SummaryStats,
}

impl Record {
    pub fn new(experiment: &str, n: usize, epsilon: Option<f64>, statistic: &str, stats: SummaryStats) -> Self {
        Self {
            experiment: experiment.to_string(),
            n,
            epsilon,
            statistic: statistic.to_string(),
            stats,
        }
    }
}

/// Finds the record with the given `n`, statistic and (optional) epsilon.
pub fn find<'a>(records: &'a [Record], n: usize, statistic: &str, epsilon: Option<f64>) -> Option<&'a Record> {
    records
        .iter()
        .find(|r| r.n == n && r.statistic == statistic && r.epsilon == epsilon)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub epsilon_range: (f64, f64),
    pub r_squared: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 4;

/// Least squares of `log p` on `log ε` over the points with `ε, p > 0`.
pub fn fit_tail_slope(points: &[(f64, f64)]) -> Result<TailFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(e, p)| *e > 0.0 && *p > 0.0 && e.is_finite() && p.is_finite())
        .map(|&(e, p)| (e.ln(), p.ln()))
        .collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "tail fit needs {MIN_FIT_POINTS} points with positive probability, got {}",
            usable.len()
        )));
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("tail fit needs distinct epsilons".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = usable
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    let lo = usable.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).exp();
    let hi = usable.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(TailFit {
        slope,
        intercept,
        epsilon_range: (lo, hi),
        r_squared,
        points: usable.len(),
    })
}
