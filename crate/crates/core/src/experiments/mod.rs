//! Seeded Monte Carlo and exhaustive-enumeration experiments.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]: trial `t`
//! at matrix size `n` draws from substream `t` of the key
//! `(master_seed, experiment name, "n=<n>")`, and results are folded in trial
//! order, so the output does not depend on the number of threads.

mod config;
mod eigen;
mod enumeration;
mod normal;
mod output;
mod records;
mod singular;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::rng::StreamKey;

pub use config::{
    default_epsilon_grid, geometric_grid, rank_one_shift, BaseDistribution, EnsembleConfig, ExperimentConfig,
    ExperimentKind, ExperimentOptions, FieldKind, LcdConfig, LcdSetup, ShiftKind, TestVector, DEFAULT_NET_K,
};
pub use eigen::{
    check_interval_net, net_detects, run_all_real_probability, run_interval_net_check, run_real_axis_proximity,
    run_real_eig_stats, IntervalNetOutcome,
};
pub use enumeration::{run_singularity_enumeration, singularity_count, SingularityCount};
pub use normal::{normal_certificate, run_normal_vector_lcd, NormalCertificate};
pub use output::{records_csv, write_outputs, FileEntry, Manifest, Provenance, CSV_HEADER, VERSION};
pub use records::{find, fit_tail_slope, Record, SummaryStats, TailFit, MIN_FIT_POINTS};
pub use singular::{
    compressible_floor_of, run_compressible_floor, run_lsv_tail, run_single_vector_bound, sample_compressible_vector,
};

/// Records plus experiment-specific details for the JSON summary.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutput {
    pub experiment: ExperimentKind,
    pub records: Vec<Record>,
    pub details: serde_json::Value,
    pub notes: Vec<String>,
}

impl ExperimentOutput {
    fn new(experiment: ExperimentKind, records: Vec<Record>, details: serde_json::Value) -> Self {
        Self {
            experiment,
            records,
            details,
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.notes.push(note.to_string());
        self
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    match config.experiment_name {
        ExperimentKind::RealEigStats => run_real_eig_stats(config),
        ExperimentKind::AllRealProbability => run_all_real_probability(config),
        ExperimentKind::LsvTail => run_lsv_tail(config),
        ExperimentKind::SingularityEnumeration => run_singularity_enumeration(config),
        ExperimentKind::RealAxisProximity => run_real_axis_proximity(config),
        ExperimentKind::CompressibleFloor => run_compressible_floor(config),
        ExperimentKind::SingleVectorBound => run_single_vector_bound(config),
        ExperimentKind::NormalVectorLcd => run_normal_vector_lcd(config),
        ExperimentKind::IntervalNetCheck => run_interval_net_check(config),
    }
}

pub(crate) fn size_key(config: &ExperimentConfig, n: usize) -> StreamKey {
    StreamKey::new(config.master_seed, config.experiment_name.name()).child(&format!("n={n}"))
}

/// Runs `f` on every trial index in parallel; results are in trial order.
pub(crate) fn par_trials<T, F>(trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

pub(crate) fn count_where<T>(xs: &[T], pred: impl Fn(&T) -> bool) -> u64 {
    xs.iter().filter(|x| pred(x)).count() as u64
}
