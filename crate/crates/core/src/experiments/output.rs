use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use super::records::Record;
use super::{ExperimentConfig, ExperimentOutput};
use crate::error::Result;

/// Version string recorded in every summary; a build may inject a
/// `git describe` string through `LSV_LAB_GIT_DESCRIBE`.
pub const VERSION: &str = match option_env!("LSV_LAB_GIT_DESCRIBE") {
    Some(v) => v,
    None => concat!("v", env!("CARGO_PKG_VERSION")),
};

pub const CSV_HEADER: [&str; 9] = [
    "experiment",
    "n",
    "epsilon",
    "statistic",
    "estimate",
    "stderr",
    "trials",
    "theory_value",
    "theory_ref",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Seed actually used.
    pub master_seed: u64,
    /// Seed written in the configuration file.
    pub config_seed: u64,
    pub seed_overridden: bool,
}

impl Provenance {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            master_seed: config.master_seed,
            config_seed: config.master_seed,
            seed_overridden: false,
        }
    }

    /// Applies a seed override to `config` and records it.
    pub fn with_override(config: &mut ExperimentConfig, seed: Option<u64>) -> Self {
        let config_seed = config.master_seed;
        if let Some(s) = seed {
            config.master_seed = s;
        }
        Self {
            master_seed: config.master_seed,
            config_seed,
            seed_overridden: seed.is_some(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn digest(&self, file: &str) -> Option<&str> {
        self.files.iter().find(|f| f.file == file).map(|f| f.sha256.as_str())
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per record in the order given.
pub fn records_csv(records: &[Record]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.n.to_string(),
            opt(r.epsilon),
            r.statistic.clone(),
            r.stats.estimate.to_string(),
            r.stats.stderr.to_string(),
            r.stats.trials.to_string(),
            opt(r.stats.theory_value),
            r.stats.theory_ref.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn entry(file: &str, contents: &[u8]) -> FileEntry {
    FileEntry {
        file: file.to_string(),
        sha256: hex::encode(Sha256::digest(contents)),
        bytes: contents.len() as u64,
    }
}

/// Writes `results.csv`, `summary.json`, `config.toml` (the effective
/// configuration) and `manifest.json` (SHA-256 of the other three).
pub fn write_outputs(
    output: &ExperimentOutput,
    config: &ExperimentConfig,
    provenance: &Provenance,
    out_dir: &Path,
) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir)?;
    let csv = records_csv(&output.records)?;
    let summary = json!({
        "version": VERSION,
        "experiment": output.experiment,
        "provenance": provenance,
        "ensemble": config.ensemble.describe(),
        "n_values": config.n_values,
        "trials": config.trials,
        "notes": output.notes,
        "records": output.records,
        "details": output.details,
    });
    let summary = serde_json::to_string_pretty(&summary)? + "\n";
    let echo = config.to_toml()?;
    let mut files = Vec::new();
    for (name, contents) in [("results.csv", csv), ("summary.json", summary), ("config.toml", echo)] {
        std::fs::write(out_dir.join(name), &contents)?;
        files.push(entry(name, contents.as_bytes()));
    }
    let manifest = Manifest { files };
    std::fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}
