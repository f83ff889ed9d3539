//! Lévy concentration `𝓛(S, ε) = sup_w P(|S − w| ≤ ε)` of random sums, in
//! one dimension (`S = Σ a_k ξ_k`) and for the planar bracket form
//! `S = [v]ξ̂`, plus evaluation of the LCD small-ball bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{GenuinelyComplexSpec, ScalarDistribution};
use crate::error::{ensure_unit, Error, Result};
use crate::lcd::LcdResult;
use crate::rng::StreamKey;
use crate::stats::Proportion;
use crate::Complex64;

/// Largest outcome count enumerated by [`levy_1d_exact`].
pub const EXACT_LIMIT: u128 = 10_000_000;
/// Enumerable inputs up to this size also get an `exact` value in
/// Monte Carlo estimates.
const AUTO_EXACT_LIMIT: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationEstimate {
    pub epsilon: f64,
    /// Best empirical ε-window (1-D: exact over all centers).
    pub lower: f64,
    /// The same functional at 2ε.
    pub upper: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub exact: Option<f64>,
}

impl ConcentrationEstimate {
    fn from_counts(epsilon: f64, lower: u64, upper: u64, trials: u64, exact: Option<f64>) -> Self {
        let p = Proportion::new(lower, trials);
        Self {
            epsilon,
            lower: p.estimate,
            upper: upper as f64 / trials as f64,
            stderr: p.stderr,
            ci_low: p.ci_low,
            ci_high: p.ci_high,
            trials,
            exact,
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be finite and nonnegative")));
    }
    Ok(())
}

/// Tolerance that merges sums differing only by rounding.
fn atom_tolerance(a: &[f64], support_scale: f64) -> f64 {
    1e-12 * a.iter().map(|x| x.abs()).sum::<f64>() * support_scale.max(1.0)
}

/// Largest count (or total weight) of sorted values inside a closed window
/// of the given width.
fn best_window(sorted: &[f64], weights: Option<&[f64]>, width: f64) -> f64 {
    let mut best = 0.0f64;
    let mut acc = 0.0;
    let mut lo = 0;
    for hi in 0..sorted.len() {
        acc += weights.map_or(1.0, |w| w[hi]);
        while sorted[hi] - sorted[lo] > width {
            acc -= weights.map_or(1.0, |w| w[lo]);
            lo += 1;
        }
        best = best.max(acc);
    }
    best
}

fn weighted_sum(a: &[f64], xs: impl Iterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    for (ak, x) in a.iter().zip(xs) {
        s += ak * x;
    }
    s
}

/// Monte Carlo estimate of `𝓛(Σ a_k ξ_k, ε)`; trial `t` uses substream `t`
/// of `key`. In 1-D the sup over centers of the empirical measure is exact
/// (sort and slide a window of width 2ε).
pub fn levy_1d(
    a: &[f64],
    dist: &ScalarDistribution,
    epsilon: f64,
    trials: u64,
    key: &StreamKey,
) -> Result<ConcentrationEstimate> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("empty coefficient vector".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    check_epsilon(epsilon)?;
    let mut samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = key.stream(t);
            weighted_sum(a, a.iter().map(|_| dist.sample(&mut s)))
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let scale = dist
        .atoms()
        .map_or(1.0, |(v, _)| v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let tol = atom_tolerance(a, scale);
    let lower = best_window(&samples, None, 2.0 * epsilon + tol) as u64;
    let upper = best_window(&samples, None, 4.0 * epsilon + tol) as u64;
    let exact = match dist.atoms() {
        Some((values, _)) if (values.len() as u128).checked_pow(a.len() as u32).is_some_and(|c| c <= AUTO_EXACT_LIMIT) => {
            Some(levy_1d_exact(a, dist, epsilon)?)
        }
        _ => None,
    };
    Ok(ConcentrationEstimate::from_counts(epsilon, lower, upper, trials, exact))
}

/// Exact `sup_w P(|Σ a_k ξ_k − w| ≤ ε)` for a finitely supported law, by
/// enumerating all outcomes.
pub fn levy_1d_exact(a: &[f64], dist: &ScalarDistribution, epsilon: f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("empty coefficient vector".into()));
    }
    check_epsilon(epsilon)?;
    let (values, weights) = dist
        .atoms()
        .ok_or_else(|| Error::InvalidParameter("exact concentration needs a finitely supported law".into()))?;
    let m = values.len();
    let size = (m as u128).checked_pow(a.len() as u32).unwrap_or(u128::MAX);
    if size > EXACT_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size,
            limit: EXACT_LIMIT,
        });
    }
    let n = a.len();
    let mut idx = vec![0usize; n];
    let mut outcomes: Vec<(f64, f64)> = Vec::with_capacity(size as usize);
    loop {
        let s = weighted_sum(a, idx.iter().map(|&i| values[i]));
        let w: f64 = idx.iter().map(|&i| weights[i]).product();
        outcomes.push((s, w));
        let mut j = 0;
        loop {
            if j == n {
                break;
            }
            idx[j] += 1;
            if idx[j] < m {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == n {
            break;
        }
    }
    outcomes.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (xs, ws): (Vec<f64>, Vec<f64>) = outcomes.into_iter().unzip();
    let scale = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let tol = atom_tolerance(a, scale);
    Ok(best_window(&xs, Some(&ws), 2.0 * epsilon + tol).min(1.0))
}

/// Largest number of points in a closed disk of radius `radius` centred at
/// one of the points.
fn best_disk(points: &mut [[f64; 2]], radius: f64) -> u64 {
    points.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    let r2 = radius * radius;
    let mut best = 0u64;
    let mut lo = 0;
    let mut hi = 0;
    for i in 0..points.len() {
        let [x, y] = points[i];
        while points[lo][0] < x - radius {
            lo += 1;
        }
        while hi < points.len() && points[hi][0] <= x + radius {
            hi += 1;
        }
        let count = points[lo..hi]
            .iter()
            .filter(|q| (q[0] - x).powi(2) + (q[1] - y).powi(2) <= r2)
            .count() as u64;
        best = best.max(count);
    }
    best
}

/// Monte Carlo bracket for `𝓛([v]ξ̂, ε)` where `ξ̂ ∈ ℝ²ⁿ` realifies a column
/// of genuinely complex entries. `lower` uses sample-centred ε-disks and
/// `upper` sample-centred 2ε-disks; the optimal ε-disk lies in one of the
/// latter whenever it contains a sample.
pub fn levy_2d(
    v: &[Complex64],
    spec: &GenuinelyComplexSpec,
    epsilon: f64,
    trials: u64,
    key: &StreamKey,
) -> Result<ConcentrationEstimate> {
    if v.is_empty() {
        return Err(Error::InvalidParameter("empty vector".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    ensure_unit(v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())?;
    check_epsilon(epsilon)?;
    let mut points: Vec<[f64; 2]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = key.stream(t);
            let mut acc = Complex64::new(0.0, 0.0);
            for vk in v {
                acc += vk * spec.sample(&mut s);
            }
            [acc.re, acc.im]
        })
        .collect();
    let scale = spec
        .base
        .atoms()
        .map_or(1.0, |(vals, _)| vals.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let l1: Vec<f64> = v.iter().map(|z| z.norm() * std::f64::consts::SQRT_2).collect();
    let tol = atom_tolerance(&l1, scale);
    let lower = best_disk(&mut points, epsilon + tol);
    let upper = best_disk(&mut points, 2.0 * epsilon + tol);
    Ok(ConcentrationEstimate::from_counts(epsilon, lower, upper, trials, None))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallBallBoundParams {
    pub c_big: f64,
    pub c_small: f64,
    pub alpha: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmallBallBound {
    pub applicable: bool,
    pub bound_value: f64,
}

/// `C ε² + C exp(−c α²)`, applicable when `ε ≥ 4/LCD` (with the certified
/// lower bound of the LCD).
pub fn smallball_bound(lcd: &LcdResult, bound: &SmallBallBoundParams, epsilon: f64) -> Result<SmallBallBound> {
    check_epsilon(epsilon)?;
    if !(bound.c_big > 0.0 && bound.c_small > 0.0) {
        return Err(Error::InvalidParameter("bound constants must be positive".into()));
    }
    let lcd_lower = lcd.lower_bound();
    let applicable = if lcd_lower.is_infinite() {
        true
    } else {
        lcd_lower > 0.0 && epsilon * lcd_lower >= 4.0
    };
    let bound_value =
        bound.c_big * epsilon * epsilon + bound.c_big * (-bound.c_small * bound.alpha * bound.alpha).exp();
    Ok(SmallBallBound {
        applicable,
        bound_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcd::LcdValue;

    fn key(label: &str) -> StreamKey {
        StreamKey::new(2024, label)
    }

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn exact_worked_examples() {
        let rad = ScalarDistribution::rademacher();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = vec![0.0; 6];
        a[0] = s;
        a[1] = s;
        assert_eq!(levy_1d_exact(&a, &rad, 0.0).unwrap(), 0.5);
        for n in [2u64, 4, 6, 10, 16] {
            let flat = vec![1.0 / (n as f64).sqrt(); n as usize];
            let exact = levy_1d_exact(&flat, &rad, 0.0).unwrap();
            let expected = binom(n, n / 2) / 2f64.powi(n as i32);
            assert!((exact - expected).abs() < 1e-15, "n={n}: {exact} vs {expected}");
        }
        assert_eq!(levy_1d_exact(&[1.0 / 6f64.sqrt(); 6], &rad, 0.0).unwrap(), 0.3125);
        let a = [0.3, -0.7, 1.1];
        assert_eq!(levy_1d_exact(&a, &rad, 2.0 * 2.1).unwrap(), 1.0);
        assert!(levy_1d_exact(&a, &ScalarDistribution::standard_gaussian(), 0.0).is_err());
        assert!(matches!(
            levy_1d_exact(&[0.1; 30], &rad, 0.0),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn monte_carlo_rademacher() {
        let rad = ScalarDistribution::rademacher();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let est = levy_1d(&[s, s], &rad, 0.0, 20_000, &key("pair")).unwrap();
        assert!((est.lower - 0.5).abs() < 4.0 * est.stderr);
        assert_eq!(est.exact, Some(0.5));
        let est = levy_1d(&[0.5; 4], &rad, 0.0, 20_000, &key("flat4")).unwrap();
        assert!((est.lower - 0.375).abs() < 4.0 * est.stderr);
        assert!(est.lower <= est.upper);
    }

    #[test]
    fn monte_carlo_gaussian() {
        let g = ScalarDistribution::standard_gaussian();
        let est = levy_1d(&[1.0], &g, 0.1, 100_000, &key("gauss")).unwrap();
        let exact = statrs::function::erf::erf(0.1 / std::f64::consts::SQRT_2);
        // The empirical sup over windows is biased upward by a few stderr.
        assert!(est.lower >= exact - 4.0 * est.stderr && est.lower <= exact + 8.0 * est.stderr);
        assert!(est.exact.is_none());
        assert!(levy_1d(&[], &g, 0.1, 10, &key("e")).is_err());
        assert!(levy_1d(&[1.0], &g, -0.1, 10, &key("e")).is_err());
    }

    #[test]
    fn monotone_in_epsilon() {
        let rad = ScalarDistribution::uniform_symmetric();
        let a = [0.5, 0.5, 0.5, 0.5];
        let mut last = 0.0;
        for eps in [0.0, 0.05, 0.1, 0.2, 0.4] {
            let est = levy_1d(&a, &rad, eps, 5_000, &key("mono")).unwrap();
            assert!(est.lower >= last);
            assert!(est.lower <= est.upper);
            last = est.lower;
        }
        // Upper at ε is lower at 2ε on the same sample.
        let e1 = levy_1d(&a, &rad, 0.1, 5_000, &key("mono")).unwrap();
        let e2 = levy_1d(&a, &rad, 0.2, 5_000, &key("mono")).unwrap();
        assert_eq!(e1.upper, e2.lower);
    }

    #[test]
    fn planar_single_coordinate() {
        let spec = GenuinelyComplexSpec::new(ScalarDistribution::rademacher());
        let mut v = vec![Complex64::new(0.0, 0.0); 3];
        v[0] = Complex64::new(1.0, 0.0);
        let est = levy_2d(&v, &spec, 0.0, 20_000, &key("e1")).unwrap();
        assert!((est.lower - 0.25).abs() < 4.0 * est.stderr);
        let est = levy_2d(&v, &spec, 2.0, 2_000, &key("e1")).unwrap();
        assert_eq!(est.upper, 1.0);
        // Disks centred at a sample of radius 2 reach the opposite atom at 2√2
        // only at 2ε.
        assert!(est.lower >= 0.5);
    }

    #[test]
    fn planar_gaussian_scaling() {
        let spec = GenuinelyComplexSpec::new(ScalarDistribution::standard_gaussian());
        let n = 16;
        let s = 1.0 / (n as f64).sqrt();
        let v = vec![Complex64::new(s, 0.0); n];
        let est: Vec<f64> = [0.1, 0.2, 0.4]
            .iter()
            .map(|&e| levy_2d(&v, &spec, e, 20_000, &key("flat16")).unwrap().lower)
            .collect();
        for w in est.windows(2) {
            let ratio = w[1] / w[0];
            assert!(ratio > 2.5 && ratio < 5.5, "ratio {ratio}");
        }
    }

    #[test]
    fn bound_arithmetic() {
        let lcd = LcdResult {
            value: LcdValue::AtLeast(100.0),
            witness_theta: None,
            witness_p: None,
            residual: None,
            certified_resolution: 0.0,
            cells_explored: 0,
        };
        let params = SmallBallBoundParams { c_big: 1.0, c_small: 0.6, alpha: 0.2 * 20.0, gamma: 0.1 };
        let b = smallball_bound(&lcd, &params, 0.05).unwrap();
        assert!(b.applicable);
        assert!((-0.6f64 * 16.0).exp() < 1e-4);
        assert!((b.bound_value - (0.0025 + (-9.6f64).exp())).abs() < 1e-15);
        assert!(!smallball_bound(&lcd, &params, 0.0).unwrap().applicable);
        assert!(!smallball_bound(&lcd, &params, 0.039).unwrap().applicable);
    }
}
