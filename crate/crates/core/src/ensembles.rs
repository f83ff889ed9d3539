//! Scalar laws and the random matrix ensembles `N_n` and `M_n = M + N_n`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::{spectra, Complex64, ComplexMatrix, RealMatrix};

const MOMENT_TOL: f64 = 1e-12;
const SQRT_3: f64 = 1.7320508075688772;

/// Shape of a mean-zero, variance-one real law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DistributionKind {
    Rademacher,
    StandardGaussian,
    /// Uniform on `[-√3, √3]`.
    UniformSymmetric,
    DiscreteCustom { values: Vec<f64>, weights: Vec<f64> },
}

/// A real scalar law with mean 0 and variance 1.
///
/// `subgaussian_moment` is metadata: it is never used to gate sampling. The
/// built-in defaults are valid (not necessarily minimal) subgaussian moments.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarDistribution {
    kind: DistributionKind,
    subgaussian_moment: f64,
    cumulative: Vec<f64>,
}

impl ScalarDistribution {
    pub fn rademacher() -> Self {
        Self {
            kind: DistributionKind::Rademacher,
            subgaussian_moment: 1.0 / std::f64::consts::LN_2.sqrt(),
            cumulative: Vec::new(),
        }
    }

    pub fn standard_gaussian() -> Self {
        Self {
            kind: DistributionKind::StandardGaussian,
            subgaussian_moment: std::f64::consts::SQRT_2,
            cumulative: Vec::new(),
        }
    }

    pub fn uniform_symmetric() -> Self {
        Self {
            kind: DistributionKind::UniformSymmetric,
            subgaussian_moment: SQRT_3 / std::f64::consts::LN_2.sqrt(),
            cumulative: Vec::new(),
        }
    }

    /// A finitely supported law. Weights must be nonnegative and sum to 1,
    /// and the law must have mean 0 and variance 1 (all to within 1e-12).
    pub fn discrete(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "discrete law needs matching nonempty values and weights".into(),
            ));
        }
        if values.iter().chain(&weights).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("discrete law has non-finite entries".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MOMENT_TOL {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
        }
        let mean: f64 = values.iter().zip(&weights).map(|(x, w)| x * w).sum();
        let second: f64 = values.iter().zip(&weights).map(|(x, w)| x * x * w).sum();
        if mean.abs() > MOMENT_TOL {
            return Err(Error::InvalidParameter(format!("mean is {mean}, not 0")));
        }
        if (second - mean * mean - 1.0).abs() > MOMENT_TOL {
            return Err(Error::InvalidParameter(format!(
                "variance is {}, not 1",
                second - mean * mean
            )));
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        let max_abs = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(Self {
            kind: DistributionKind::DiscreteCustom { values, weights },
            subgaussian_moment: max_abs / std::f64::consts::LN_2.sqrt(),
            cumulative,
        })
    }

    pub fn with_subgaussian_moment(mut self, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("subgaussian moment {b} must be positive")));
        }
        self.subgaussian_moment = b;
        Ok(self)
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn subgaussian_moment(&self) -> f64 {
        self.subgaussian_moment
    }

    /// Support points and their probabilities, when finitely supported.
    pub fn atoms(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.kind {
            DistributionKind::Rademacher => Some((vec![-1.0, 1.0], vec![0.5, 0.5])),
            DistributionKind::DiscreteCustom { values, weights } => {
                Some((values.clone(), weights.clone()))
            }
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            DistributionKind::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            DistributionKind::StandardGaussian => StandardNormal.sample(rng),
            DistributionKind::UniformSymmetric => (2.0 * rng.random::<f64>() - 1.0) * SQRT_3,
            DistributionKind::DiscreteCustom { values, .. } => {
                let u: f64 = rng.random();
                let idx = self.cumulative.partition_point(|&c| c <= u);
                values[idx.min(values.len() - 1)]
            }
        }
    }
}

/// `ζ = ξ + iξ'` with `ξ, ξ'` iid copies of `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenuinelyComplexSpec {
    pub base: ScalarDistribution,
}

impl GenuinelyComplexSpec {
    pub fn new(base: ScalarDistribution) -> Self {
        Self { base }
    }

    /// Real part first, then imaginary part.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let re = self.base.sample(rng);
        let im = self.base.sample(rng);
        Complex64::new(re, im)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EntryLaw {
    Real(ScalarDistribution),
    GenuinelyComplex(GenuinelyComplexSpec),
}

impl EntryLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self {
            EntryLaw::Real(d) => Complex64::new(d.sample(rng), 0.0),
            EntryLaw::GenuinelyComplex(s) => s.sample(rng),
        }
    }
}

/// Ensemble of `n×n` matrices `M + N` with iid entries in `N`.
#[derive(Clone, Debug)]
pub struct EnsembleSpec {
    n: usize,
    entry_law: EntryLaw,
    shift: Option<ComplexMatrix>,
    shift_norm_bound: Option<f64>,
}

impl EnsembleSpec {
    pub fn new(n: usize, entry_law: EntryLaw) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("ensemble size n must be positive".into()));
        }
        Ok(Self {
            n,
            entry_law,
            shift: None,
            shift_norm_bound: None,
        })
    }

    /// Attaches a deterministic shift (`n×n` or `(n−1)×n`). When `norm_bound`
    /// is given, `‖M‖ ≤ K√n` is checked here.
    pub fn with_shift(mut self, shift: ComplexMatrix, norm_bound: Option<f64>) -> Result<Self> {
        let n = self.n;
        if shift.ncols() != n || !(shift.nrows() == n || shift.nrows() + 1 == n) {
            return Err(Error::DimensionMismatch(format!(
                "shift is {}×{}, ensemble size is {n}",
                shift.nrows(),
                shift.ncols()
            )));
        }
        if let Some(k) = norm_bound {
            if k.is_nan() || k <= 0.0 {
                return Err(Error::InvalidParameter(format!("norm bound K = {k} must be positive")));
            }
            let norm = spectra::operator_norm(&shift)?;
            let limit = k * (n as f64).sqrt();
            if norm > limit * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "shift operator norm {norm} exceeds K√n = {limit}"
                )));
            }
        }
        self.shift = Some(shift);
        self.shift_norm_bound = norm_bound;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry_law(&self) -> &EntryLaw {
        &self.entry_law
    }

    pub fn shift(&self) -> Option<&ComplexMatrix> {
        self.shift.as_ref()
    }

    pub fn shift_norm_bound(&self) -> Option<f64> {
        self.shift_norm_bound
    }

    pub fn is_real(&self) -> bool {
        matches!(self.entry_law, EntryLaw::Real(_))
            && self
                .shift
                .as_ref()
                .is_none_or(|m| m.iter().all(|z| z.im == 0.0))
    }
}

pub fn sample_real_scalar(dist: &ScalarDistribution, stream: &mut RandomStream) -> f64 {
    dist.sample(stream)
}

pub fn sample_complex_scalar(spec: &GenuinelyComplexSpec, stream: &mut RandomStream) -> Complex64 {
    spec.sample(stream)
}

/// Fills `rows × n` entries in row-major draw order, so a row-deleted sample
/// equals the leading rows of a full sample from the same stream.
fn noise(spec: &EnsembleSpec, rows: usize, stream: &mut RandomStream) -> ComplexMatrix {
    let n = spec.n;
    let mut m = DMatrix::from_element(rows, n, Complex64::new(0.0, 0.0));
    for i in 0..rows {
        for j in 0..n {
            m[(i, j)] = spec.entry_law.sample(stream);
        }
    }
    m
}

/// Samples `M + N_n` (`n×n`).
pub fn sample_matrix(spec: &EnsembleSpec, stream: &mut RandomStream) -> Result<ComplexMatrix> {
    let n = spec.n;
    let mut m = noise(spec, n, stream);
    if let Some(shift) = &spec.shift {
        if shift.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "shift has {} rows, square sample needs {n}",
                shift.nrows()
            )));
        }
        m += shift;
    }
    Ok(m)
}

/// Samples the `(n−1)×n` matrix `M' + N'_n`. An `n×n` shift contributes its
/// leading `n−1` rows.
pub fn sample_row_deleted_matrix(
    spec: &EnsembleSpec,
    stream: &mut RandomStream,
) -> Result<ComplexMatrix> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::InvalidParameter("row-deleted sample needs n ≥ 2".into()));
    }
    let mut m = noise(spec, n - 1, stream);
    if let Some(shift) = &spec.shift {
        m += shift.rows(0, n - 1);
    }
    Ok(m)
}

/// Samples a real matrix; fails for complex laws or complex shifts.
pub fn sample_real_matrix(spec: &EnsembleSpec, stream: &mut RandomStream) -> Result<RealMatrix> {
    let EntryLaw::Real(dist) = &spec.entry_law else {
        return Err(Error::InvalidParameter("real sample requested from a complex law".into()));
    };
    let n = spec.n;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = dist.sample(stream);
        }
    }
    if let Some(shift) = &spec.shift {
        if shift.nrows() != n {
            return Err(Error::DimensionMismatch("shift must be square".into()));
        }
        if shift.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidParameter("real ensemble with a complex shift".into()));
        }
        m += shift.map(|z| z.re);
    }
    Ok(m)
}

/// Exceedance frequency `P(|ξ| > t)` next to the subgaussian envelope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailExceedance {
    pub t: f64,
    pub frequency: f64,
    pub stderr: f64,
    pub envelope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub samples: u64,
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
    pub tails: Vec<TailExceedance>,
}

/// Empirical mean, variance and tail exceedances at `t = 2, 3, 4`.
pub fn empirical_moment_report(
    dist: &ScalarDistribution,
    samples: u64,
    stream: &mut RandomStream,
) -> Result<MomentReport> {
    if samples < 1000 {
        return Err(Error::InvalidParameter("moment report needs at least 10³ samples".into()));
    }
    let draws: Vec<f64> = (0..samples).map(|_| dist.sample(stream)).collect();
    let m = crate::stats::Moments::from_values(&draws);
    let b = dist.subgaussian_moment();
    let tails = [2.0, 3.0, 4.0]
        .iter()
        .map(|&t| {
            let count = draws.iter().filter(|x| x.abs() > t).count() as u64;
            let p = crate::stats::Proportion::new(count, samples);
            TailExceedance {
                t,
                frequency: p.estimate,
                stderr: p.stderr,
                envelope: 2.0 * (-t * t / (b * b)).exp(),
            }
        })
        .collect();
    Ok(MomentReport {
        samples,
        mean: m.mean,
        mean_stderr: m.mean_stderr,
        variance: m.variance,
        variance_stderr: m.variance_stderr,
        tails,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    fn stream(seed: u64) -> RandomStream {
        RandomStream::new(seed, "ensembles-test", 0)
    }

    #[test]
    fn rademacher_support_and_unit_variance() {
        let d = ScalarDistribution::rademacher();
        let mut s = stream(1);
        let draws: Vec<f64> = (0..10_000).map(|_| sample_real_scalar(&d, &mut s)).collect();
        assert!(draws.iter().all(|&x| x == 1.0 || x == -1.0));
        let second: f64 = draws.iter().map(|x| x * x).sum::<f64>() / draws.len() as f64;
        assert_eq!(second, 1.0);
    }

    #[test]
    fn gaussian_mean_within_clt_band() {
        let d = ScalarDistribution::standard_gaussian();
        let mut s = stream(2);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| d.sample(&mut s)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4e-3, "mean {mean}");
    }

    #[test]
    fn uniform_symmetric_range_and_variance() {
        let d = ScalarDistribution::uniform_symmetric();
        let mut s = stream(3);
        let report = empirical_moment_report(&d, 200_000, &mut s).unwrap();
        assert!((report.variance - 1.0).abs() < 4.0 * report.variance_stderr + 1e-3);
        assert!(report.tails.iter().all(|t| t.frequency == 0.0));
    }

    #[test]
    fn gaussian_tail_at_three() {
        let d = ScalarDistribution::standard_gaussian();
        let mut s = stream(4);
        let report = empirical_moment_report(&d, 1_000_000, &mut s).unwrap();
        // 2(1 − Φ(3)) from the complementary error function.
        let exact = statrs::function::erf::erfc(3.0 / std::f64::consts::SQRT_2);
        let t3 = &report.tails[1];
        assert_eq!(t3.t, 3.0);
        assert!((t3.frequency - exact).abs() < 4.0 * t3.stderr, "{} vs {exact}", t3.frequency);
        assert!(t3.frequency <= t3.envelope);
    }

    #[test]
    fn rademacher_never_exceeds_two() {
        let d = ScalarDistribution::rademacher();
        let report = empirical_moment_report(&d, 1000, &mut stream(5)).unwrap();
        assert_eq!(report.tails[0].frequency, 0.0);
        assert!(empirical_moment_report(&d, 999, &mut stream(5)).is_err());
    }

    #[test]
    fn discrete_validation() {
        assert!(ScalarDistribution::discrete(vec![-1.0, 1.0], vec![0.5, 0.5]).is_ok());
        // mean not zero
        assert!(ScalarDistribution::discrete(vec![0.0, 2.0], vec![0.5, 0.5]).is_err());
        // variance not one
        assert!(ScalarDistribution::discrete(vec![-2.0, 2.0], vec![0.5, 0.5]).is_err());
        // weights
        assert!(ScalarDistribution::discrete(vec![-1.0, 1.0], vec![0.6, 0.5]).is_err());
        assert!(ScalarDistribution::discrete(vec![-1.0, 1.0], vec![1.5, -0.5]).is_err());
        // three-point law: ±√2 w.p. 1/4 each, 0 w.p. 1/2
        let s2 = std::f64::consts::SQRT_2;
        let d = ScalarDistribution::discrete(vec![-s2, 0.0, s2], vec![0.25, 0.5, 0.25]).unwrap();
        let mut s = stream(6);
        let draws: Vec<f64> = (0..40_000).map(|_| d.sample(&mut s)).collect();
        let zeros = draws.iter().filter(|&&x| x == 0.0).count() as f64 / draws.len() as f64;
        assert!((zeros - 0.5).abs() < 0.01);
    }

    #[test]
    fn complex_rademacher_atoms_and_moments() {
        let spec = GenuinelyComplexSpec::new(ScalarDistribution::rademacher());
        let mut s = stream(7);
        let n = 1_000_000;
        let mut counts = [0u64; 4];
        let mut cross = 0.0;
        for _ in 0..n {
            let z = sample_complex_scalar(&spec, &mut s);
            assert!(z.re.abs() == 1.0 && z.im.abs() == 1.0);
            let idx = (z.re > 0.0) as usize * 2 + (z.im > 0.0) as usize;
            counts[idx] += 1;
            cross += z.re * z.im;
        }
        for c in counts {
            let f = c as f64 / n as f64;
            assert!((f - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / n as f64).sqrt());
        }
        assert!((cross / n as f64).abs() < 4e-3);
    }

    #[test]
    fn complex_gaussian_second_moment() {
        let spec = GenuinelyComplexSpec::new(ScalarDistribution::standard_gaussian());
        let mut s = stream(8);
        let n = 1_000_000;
        let m2: f64 = (0..n).map(|_| spec.sample(&mut s).norm_sqr()).sum::<f64>() / n as f64;
        assert!((m2 - 2.0).abs() < 0.01, "{m2}");
    }

    #[test]
    fn row_deleted_is_prefix_of_full_sample() {
        let law = EntryLaw::GenuinelyComplex(GenuinelyComplexSpec::new(
            ScalarDistribution::standard_gaussian(),
        ));
        let spec = EnsembleSpec::new(5, law).unwrap();
        let key = StreamKey::new(11, "prefix");
        let full = sample_matrix(&spec, &mut key.stream(2)).unwrap();
        let deleted = sample_row_deleted_matrix(&spec, &mut key.stream(2)).unwrap();
        assert_eq!(deleted.shape(), (4, 5));
        assert_eq!(deleted, full.rows(0, 4).into_owned());
        let spec2 = EnsembleSpec::new(2, spec.entry_law().clone()).unwrap();
        assert_eq!(sample_row_deleted_matrix(&spec2, &mut key.stream(0)).unwrap().shape(), (1, 2));
    }

    #[test]
    fn one_by_one_rademacher() {
        let law = EntryLaw::GenuinelyComplex(GenuinelyComplexSpec::new(ScalarDistribution::rademacher()));
        let spec = EnsembleSpec::new(1, law).unwrap();
        let m = sample_matrix(&spec, &mut stream(9)).unwrap();
        assert_eq!(m.shape(), (1, 1));
        assert!(m[(0, 0)].re.abs() == 1.0 && m[(0, 0)].im.abs() == 1.0);
    }

    #[test]
    fn shift_norm_bound_is_enforced() {
        let n = 9;
        let law = EntryLaw::GenuinelyComplex(GenuinelyComplexSpec::new(ScalarDistribution::rademacher()));
        let big = ComplexMatrix::identity(n, n) * Complex64::new(5.0 * (n as f64).sqrt(), 0.0);
        let spec = EnsembleSpec::new(n, law.clone()).unwrap();
        assert!(spec.clone().with_shift(big.clone(), Some(1.0)).is_err());
        assert!(spec.clone().with_shift(big, Some(5.0)).is_ok());
        let wrong = ComplexMatrix::zeros(n, n + 1);
        assert!(matches!(
            spec.with_shift(wrong, None),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn shifted_sample_adds_shift() {
        let n = 3;
        let law = EntryLaw::Real(ScalarDistribution::rademacher());
        let shift = ComplexMatrix::identity(n, n) * Complex64::new(10.0, 0.0);
        let spec = EnsembleSpec::new(n, law.clone()).unwrap().with_shift(shift, None).unwrap();
        let plain = EnsembleSpec::new(n, law).unwrap();
        let key = StreamKey::new(1, "shift");
        let a = sample_matrix(&spec, &mut key.stream(0)).unwrap();
        let b = sample_matrix(&plain, &mut key.stream(0)).unwrap();
        let diff = a - b;
        assert_eq!(diff, ComplexMatrix::identity(n, n) * Complex64::new(10.0, 0.0));
        assert!(spec.is_real());
        let r = sample_real_matrix(&spec, &mut key.stream(0)).unwrap();
        assert_eq!(r.map(|x| Complex64::new(x, 0.0)), sample_matrix(&spec, &mut key.stream(0)).unwrap());
    }
}
