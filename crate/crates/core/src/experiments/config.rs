//! TOML experiment configuration.
//!
//! ```toml
//! experiment_name = "all_real_probability"
//! n_values = [2, 3, 4]
//! trials = 10000
//! master_seed = 7
//!
//! [ensemble]
//! field = "real"
//! distribution = "gaussian"
//! ```
//!
//! Unknown keys are rejected at every level.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleSpec, EntryLaw, GenuinelyComplexSpec, ScalarDistribution};
use crate::error::{Error, Result};
use crate::lcd::{derive_lcd_constants, LcdConstants, LcdParams, SearchOptions};
use crate::vector_geometry::{DecompParams, SpreadParams};
use crate::{Complex64, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    RealEigStats,
    AllRealProbability,
    LsvTail,
    SingularityEnumeration,
    RealAxisProximity,
    CompressibleFloor,
    SingleVectorBound,
    NormalVectorLcd,
    IntervalNetCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        Self::RealEigStats,
        Self::AllRealProbability,
        Self::LsvTail,
        Self::SingularityEnumeration,
        Self::RealAxisProximity,
        Self::CompressibleFloor,
        Self::SingleVectorBound,
        Self::NormalVectorLcd,
        Self::IntervalNetCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::RealEigStats => "real_eig_stats",
            Self::AllRealProbability => "all_real_probability",
            Self::LsvTail => "lsv_tail",
            Self::SingularityEnumeration => "singularity_enumeration",
            Self::RealAxisProximity => "real_axis_proximity",
            Self::CompressibleFloor => "compressible_floor",
            Self::SingleVectorBound => "single_vector_bound",
            Self::NormalVectorLcd => "normal_vector_lcd",
            Self::IntervalNetCheck => "interval_net_check",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Real,
    #[default]
    Complex,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseDistribution {
    #[default]
    Gaussian,
    Rademacher,
    Uniform,
}

impl BaseDistribution {
    pub fn scalar(self) -> ScalarDistribution {
        match self {
            Self::Gaussian => ScalarDistribution::standard_gaussian(),
            Self::Rademacher => ScalarDistribution::rademacher(),
            Self::Uniform => ScalarDistribution::uniform_symmetric(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    #[default]
    None,
    /// `K√n·uv*` with `u` the normalized all-ones vector and `v` the
    /// normalized alternating-sign vector.
    RankOne,
}

fn default_shift_k() -> f64 {
    0.5
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default)]
    pub field: FieldKind,
    #[serde(default)]
    pub distribution: BaseDistribution,
    #[serde(default)]
    pub shift: ShiftKind,
    #[serde(default = "default_shift_k")]
    pub shift_k: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            field: FieldKind::default(),
            distribution: BaseDistribution::default(),
            shift: ShiftKind::default(),
            shift_k: default_shift_k(),
        }
    }
}

/// The fixed rank-one shift `K√n·uv*`; its operator norm is exactly `K√n`.
pub fn rank_one_shift(n: usize, k: f64) -> ComplexMatrix {
    let s = 1.0 / (n as f64).sqrt();
    let scale = k * (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |_, j| {
        let vj = if j % 2 == 0 { s } else { -s };
        Complex64::new(scale * s * vj, 0.0)
    })
}

impl EnsembleConfig {
    pub fn entry_law(&self) -> EntryLaw {
        let base = self.distribution.scalar();
        match self.field {
            FieldKind::Real => EntryLaw::Real(base),
            FieldKind::Complex => EntryLaw::GenuinelyComplex(GenuinelyComplexSpec::new(base)),
        }
    }

    pub fn complex_spec(&self) -> Option<GenuinelyComplexSpec> {
        match self.field {
            FieldKind::Complex => Some(GenuinelyComplexSpec::new(self.distribution.scalar())),
            FieldKind::Real => None,
        }
    }

    pub fn spec(&self, n: usize) -> Result<EnsembleSpec> {
        let spec = EnsembleSpec::new(n, self.entry_law())?;
        match self.shift {
            ShiftKind::None => Ok(spec),
            ShiftKind::RankOne => spec.with_shift(rank_one_shift(n, self.shift_k), Some(self.shift_k)),
        }
    }

    pub fn describe(&self) -> String {
        let base = match self.distribution {
            BaseDistribution::Gaussian => "gaussian",
            BaseDistribution::Rademacher => "rademacher",
            BaseDistribution::Uniform => "uniform",
        };
        let field = match self.field {
            FieldKind::Real => "real",
            FieldKind::Complex => "complex",
        };
        match self.shift {
            ShiftKind::None => format!("{field} {base}"),
            ShiftKind::RankOne => format!("{field} {base} + rank-one shift K={}", self.shift_k),
        }
    }
}

fn default_beta() -> f64 {
    0.2
}

fn default_max_cells() -> u64 {
    20_000_000
}

/// LCD settings. `alpha` defaults to `β√n`; `gamma` and `lambda` default to
/// the constants derived from the spread parameters; `resolution` defaults to
/// `γ·λ√n/8`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcdConfig {
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default = "default_max_cells")]
    pub max_cells: u64,
}

impl Default for LcdConfig {
    fn default() -> Self {
        Self {
            beta: default_beta(),
            alpha: None,
            gamma: None,
            lambda: None,
            resolution: None,
            max_cells: default_max_cells(),
        }
    }
}

/// Resolved LCD settings for one dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LcdSetup {
    pub constants: LcdConstants,
    pub params: LcdParams,
    pub lambda: f64,
    /// `λ√n`.
    pub target: f64,
    pub options: SearchOptions,
}

impl LcdConfig {
    pub fn setup(&self, n: usize, spread: &SpreadParams) -> Result<LcdSetup> {
        let constants = derive_lcd_constants(spread)?;
        let sqrt_n = (n as f64).sqrt();
        let gamma = self.gamma.unwrap_or(constants.gamma);
        let lambda = self.lambda.unwrap_or(constants.lambda);
        let alpha = self.alpha.unwrap_or(self.beta * sqrt_n);
        let params = LcdParams::new(alpha, gamma)?;
        let target = lambda * sqrt_n;
        let mut options = SearchOptions::new(target, self.resolution.unwrap_or(gamma * target / 8.0));
        options.max_cells = self.max_cells;
        Ok(LcdSetup {
            constants,
            params,
            lambda,
            target,
            options,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestVector {
    #[default]
    E1,
    Flat,
}

/// Experiment-specific knobs; each is ignored by experiments that do not use it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentOptions {
    /// Real-axis distance thresholds.
    #[serde(default)]
    pub taus: Vec<f64>,
    #[serde(default)]
    pub test_vector: TestVector,
    #[serde(default = "default_vectors_per_matrix")]
    pub vectors_per_matrix: usize,
    /// `K′` in the net interval `[−K′√n, K′√n]`.
    #[serde(default = "default_net_k")]
    pub net_k: f64,
    /// Minimum tail count for a point to enter a slope fit.
    #[serde(default = "default_min_tail_count")]
    pub min_tail_count: u64,
}

fn default_vectors_per_matrix() -> usize {
    100
}

/// Calibrated on a pilot of ±1±i matrices (see the interval-net tests).
pub const DEFAULT_NET_K: f64 = 3.5;

fn default_net_k() -> f64 {
    DEFAULT_NET_K
}

fn default_min_tail_count() -> u64 {
    50
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            taus: Vec::new(),
            test_vector: TestVector::default(),
            vectors_per_matrix: default_vectors_per_matrix(),
            net_k: default_net_k(),
            min_tail_count: default_min_tail_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_name: ExperimentKind,
    pub n_values: Vec<usize>,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub decomp: DecompParams,
    #[serde(default)]
    pub spread: SpreadParams,
    #[serde(default)]
    pub lcd: LcdConfig,
    #[serde(default)]
    pub options: ExperimentOptions,
}

/// Geometric grid `lo, 2lo, 4lo, …` up to `hi`.
pub fn geometric_grid(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = lo;
    while x <= hi * (1.0 + 1e-12) {
        out.push(x);
        x *= 2.0;
    }
    out
}

pub fn default_epsilon_grid() -> Vec<f64> {
    geometric_grid(0.025, 0.8)
}

fn strictly_increasing_positive(xs: &[f64], name: &str) -> Result<()> {
    if xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::Config(format!("{name} must be positive and finite")));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolved()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Validates and fills the experiment-specific defaults.
    pub fn resolved(mut self) -> Result<Self> {
        use ExperimentKind as K;
        let kind = self.experiment_name;
        if self.epsilons.is_empty() {
            self.epsilons = match kind {
                K::LsvTail | K::SingleVectorBound => default_epsilon_grid(),
                K::IntervalNetCheck => vec![0.1],
                _ => Vec::new(),
            };
        }
        if self.options.taus.is_empty() && kind == K::RealAxisProximity {
            self.options.taus = vec![0.05];
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        use ExperimentKind as K;
        let kind = self.experiment_name;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(Error::Config("n_values must be nonempty".into()));
        }
        if self.n_values.contains(&0) {
            return Err(Error::Config("n_values must be positive".into()));
        }
        strictly_increasing_positive(&self.epsilons, "epsilons")?;
        strictly_increasing_positive(&self.options.taus, "options.taus")?;
        self.decomp.validate()?;
        self.spread.validate()?;
        if !(self.ensemble.shift_k > 0.0 && self.ensemble.shift_k.is_finite()) {
            return Err(Error::Config("ensemble.shift_k must be positive".into()));
        }
        if self.lcd.beta.is_nan() || self.lcd.beta <= 0.0 {
            return Err(Error::Config("lcd.beta must be positive".into()));
        }
        if self.options.net_k.is_nan() || self.options.net_k <= 0.0 {
            return Err(Error::Config("options.net_k must be positive".into()));
        }
        if self.options.vectors_per_matrix == 0 {
            return Err(Error::Config("options.vectors_per_matrix must be at least 1".into()));
        }
        let max_n = self.n_values.iter().copied().max().unwrap_or(0);
        let min_n = self.n_values.iter().copied().min().unwrap_or(0);
        let real = self.ensemble.field == FieldKind::Real;
        let real_gaussian = real
            && self.ensemble.distribution == BaseDistribution::Gaussian
            && self.ensemble.shift == ShiftKind::None;
        match kind {
            K::RealEigStats | K::AllRealProbability if !real_gaussian => {
                return Err(Error::Config(format!(
                    "{} requires a real gaussian ensemble without shift",
                    kind.name()
                )))
            }
            K::RealAxisProximity | K::CompressibleFloor | K::SingleVectorBound | K::NormalVectorLcd
            | K::IntervalNetCheck
                if real =>
            {
                return Err(Error::Config(format!("{} requires a complex ensemble", kind.name())))
            }
            _ => {}
        }
        let bad_n = match kind {
            K::AllRealProbability => max_n > 6,
            K::SingularityEnumeration => min_n < 2 || max_n > 3,
            K::NormalVectorLcd => min_n < 2 || max_n > 24,
            K::IntervalNetCheck => max_n > 32,
            K::SingleVectorBound => min_n < 2,
            _ => false,
        };
        if bad_n {
            let range = match kind {
                K::AllRealProbability => "n ≤ 6",
                K::SingularityEnumeration => "n ∈ {2, 3}",
                K::NormalVectorLcd => "2 ≤ n ≤ 24",
                K::IntervalNetCheck => "n ≤ 32",
                _ => "n ≥ 2",
            };
            return Err(Error::Config(format!("{} requires {range}", kind.name())));
        }
        if matches!(kind, K::LsvTail | K::SingleVectorBound | K::IntervalNetCheck) && self.epsilons.is_empty() {
            return Err(Error::Config("epsilons must be nonempty".into()));
        }
        Ok(())
    }
}
