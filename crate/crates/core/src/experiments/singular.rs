use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use super::config::{FieldKind, TestVector};
use super::records::{fit_tail_slope, Record, SummaryStats};
use super::{count_where, par_trials, size_key, ExperimentConfig, ExperimentOutput};
use crate::ensembles::{sample_matrix, sample_real_matrix, sample_row_deleted_matrix};
use crate::error::Result;
use crate::spectra;
use crate::stats::{Moments, Proportion};
use crate::vector_geometry::DecompParams;
use crate::{Complex64, ComplexMatrix};

/// Tabulates `P(x < ε·scale)` (or `≤` when `inclusive`) over the grid and
/// fits the slope over the cells with at least `min_count` hits.
#[allow(clippy::too_many_arguments)]
fn tail_table(
    name: &str,
    n: usize,
    values: &[f64],
    epsilons: &[f64],
    scale: f64,
    inclusive: bool,
    min_count: u64,
    statistic: &str,
    records: &mut Vec<Record>,
) -> serde_json::Value {
    let trials = values.len() as u64;
    let mut points = Vec::new();
    for &eps in epsilons {
        let threshold = eps * scale;
        let count = count_where(values, |&x| if inclusive { x <= threshold } else { x < threshold });
        let p = Proportion::new(count, trials);
        records.push(Record::new(name, n, Some(eps), statistic, SummaryStats::proportion(&p)));
        if count >= min_count {
            points.push((eps, p.estimate));
        }
    }
    match fit_tail_slope(&points) {
        Ok(fit) => json!({ "n": n, "reliable": true, "fit": fit }),
        Err(e) => json!({ "n": n, "reliable": false, "reason": e.to_string() }),
    }
}

/// Empirical CDF of `√n·s_n` on the ε grid with a log-log slope fit.
pub fn run_lsv_tail(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let name = config.experiment_name.name();
    let real = config.ensemble.field == FieldKind::Real;
    let expected = if real { 1.0 } else { 2.0 };
    let mut records = Vec::new();
    let mut fits = Vec::new();
    for &n in &config.n_values {
        let spec = config.ensemble.spec(n)?;
        let key = size_key(config, n);
        let sqrt_n = (n as f64).sqrt();
        let values = par_trials(config.trials, |t| {
            let mut s = key.stream(t);
            let sn = if real {
                spectra::singular_values_real(&sample_real_matrix(&spec, &mut s)?)?.smallest()
            } else {
                spectra::least_singular_value(&sample_matrix(&spec, &mut s)?)?
            };
            Ok(sqrt_n * sn)
        })?;
        let mut fit = tail_table(
            name,
            n,
            &values,
            &config.epsilons,
            1.0,
            true,
            config.options.min_tail_count,
            "lsv_cdf",
            &mut records,
        );
        fit["expected_slope"] = json!(expected);
        fits.push(fit);
    }
    Ok(ExperimentOutput::new(
        config.experiment_name,
        records,
        json!({ "ensemble": config.ensemble.describe(), "fits": fits }),
    )
    .with_note("only the polynomial epsilon rate is fitted; the exponentially small additive terms are not reproducible at this scale"))
}

/// A unit vector supported (before perturbation) on `max(1, ⌊δn⌋)` random
/// complex coordinates, plus a Gaussian perturbation of norm at most `ρ/2`.
pub fn sample_compressible_vector<R: Rng + ?Sized>(n: usize, decomp: &DecompParams, rng: &mut R) -> Vec<Complex64> {
    let s = ((decomp.delta * n as f64).floor() as usize).clamp(1, n);
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for i in sample_indices(rng, n, s) {
        v[i] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    normalize(&mut v);
    let mut e: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalize(&mut e);
    let size = 0.5 * decomp.rho * rng.random::<f64>();
    for (vi, ei) in v.iter_mut().zip(&e) {
        *vi += ei * size;
    }
    normalize(&mut v);
    v
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
}

fn apply(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum::<Complex64>().norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `min_v ‖Mv‖₂/√n` over the given vectors.
pub fn compressible_floor_of(m: &ComplexMatrix, vectors: &[Vec<Complex64>]) -> f64 {
    let sqrt_n = (m.ncols() as f64).sqrt();
    vectors
        .iter()
        .map(|v| apply(m, v) / sqrt_n)
        .fold(f64::INFINITY, f64::min)
}

/// Per-matrix floor of `‖M_n v‖₂/√n` over sampled compressible vectors.
pub fn run_compressible_floor(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let name = config.experiment_name.name();
    let mut records = Vec::new();
    let mut trend = Vec::new();
    for &n in &config.n_values {
        let spec = config.ensemble.spec(n)?;
        let key = size_key(config, n);
        let floors = par_trials(config.trials, |t| {
            let mut s = key.stream(t);
            let m = sample_matrix(&spec, &mut s)?;
            let vectors: Vec<_> = (0..config.options.vectors_per_matrix)
                .map(|_| sample_compressible_vector(n, &config.decomp, &mut s))
                .collect();
            Ok(compressible_floor_of(&m, &vectors))
        })?;
        let moments = Moments::from_values(&floors);
        let min = floors.iter().copied().fold(f64::INFINITY, f64::min);
        records.push(Record::new(name, n, None, "floor_min", SummaryStats::exact(min, config.trials)));
        records.push(Record::new(name, n, None, "floor_mean", SummaryStats::mean(&moments)));
        trend.push(json!({ "n": n, "floor_min": min, "floor_mean": moments.mean }));
    }
    Ok(ExperimentOutput::new(config.experiment_name, records, json!({ "floors": trend })))
}

/// Curve of `P(‖M′v‖₂ < ε√m)` for the `(n−1)×n` matrix `M′` and a fixed
/// unit vector, with the expected small-ball exponent `2m`.
pub fn run_single_vector_bound(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let name = config.experiment_name.name();
    let mut records = Vec::new();
    let mut fits = Vec::new();
    for &n in &config.n_values {
        let spec = config.ensemble.spec(n)?;
        let key = size_key(config, n);
        let v: Vec<Complex64> = match config.options.test_vector {
            TestVector::E1 => (0..n)
                .map(|i| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
                .collect(),
            TestVector::Flat => vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n],
        };
        let m_rows = n - 1;
        let values = par_trials(config.trials, |t| {
            let mut s = key.stream(t);
            Ok(apply(&sample_row_deleted_matrix(&spec, &mut s)?, &v))
        })?;
        let mut fit = tail_table(
            name,
            n,
            &values,
            &config.epsilons,
            (m_rows as f64).sqrt(),
            false,
            config.options.min_tail_count,
            "small_ball_probability",
            &mut records,
        );
        fit["expected_slope"] = json!(2 * m_rows);
        fits.push(fit);
    }
    Ok(ExperimentOutput::new(
        config.experiment_name,
        records,
        json!({ "test_vector": config.options.test_vector, "fits": fits }),
    ))
}
