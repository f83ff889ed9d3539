use serde::Serialize;
use serde_json::json;

use super::config::LcdSetup;
use super::records::{Record, SummaryStats};
use super::{count_where, par_trials, size_key, ExperimentConfig, ExperimentOutput};
use crate::ensembles::sample_row_deleted_matrix;
use crate::error::Result;
use crate::lcd::{complex_lcd_with, LcdResult};
use crate::spectra;
use crate::stats::Proportion;
use crate::vector_geometry::classify;
use crate::{Complex64, ComplexMatrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalCertificate {
    pub normal: Vec<Complex64>,
    pub lcd: LcdResult,
    /// `λ√n`.
    pub target: f64,
    pub certified: bool,
}

/// Computes the unit normal of `h` and tries to certify `LCD ≥ λ√n`.
pub fn normal_certificate(h: &ComplexMatrix, setup: &LcdSetup) -> Result<NormalCertificate> {
    let normal = spectra::unit_normal(h)?;
    let lcd = complex_lcd_with(&normal, &setup.params, &setup.options)?;
    let certified = lcd.certifies_at_least(setup.target);
    Ok(NormalCertificate {
        normal,
        lcd,
        target: setup.target,
        certified,
    })
}

/// Fraction of random `(n−1)×n` matrices whose unit normal is certified to
/// have `LCD ≥ λ√n`.
pub fn run_normal_vector_lcd(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let name = config.experiment_name.name();
    let mut records = Vec::new();
    let mut details = Vec::new();
    for &n in &config.n_values {
        let setup = config.lcd.setup(n, &config.spread)?;
        let spec = config.ensemble.spec(n)?;
        let key = size_key(config, n);
        let results = par_trials(config.trials, |t| {
            let mut s = key.stream(t);
            let h = sample_row_deleted_matrix(&spec, &mut s)?;
            let cert = normal_certificate(&h, &setup)?;
            let incompressible = !classify(&cert.normal, &config.decomp)?.is_compressible();
            Ok((cert.certified, incompressible, cert.lcd.cells_explored))
        })?;
        let certified = Proportion::new(count_where(&results, |r| r.0), config.trials);
        let incompressible = Proportion::new(count_where(&results, |r| r.1), config.trials);
        records.push(Record::new(
            name,
            n,
            Some(setup.target),
            "certified_fraction",
            SummaryStats::proportion(&certified).with_theory(1.0, "LCD >= lambda sqrt(n)"),
        ));
        records.push(Record::new(
            name,
            n,
            None,
            "incompressible_fraction",
            SummaryStats::proportion(&incompressible),
        ));
        let failures: Vec<u64> = (0..config.trials).filter(|&t| !results[t as usize].0).collect();
        details.push(json!({
            "n": n,
            "setup": setup,
            "uncertified_trials": failures,
            "cells_explored": results.iter().map(|r| r.2).sum::<u64>(),
        }));
    }
    Ok(ExperimentOutput::new(config.experiment_name, records, json!({ "sizes": details })))
}
