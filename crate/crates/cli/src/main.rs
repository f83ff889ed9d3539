//! `lsv-lab` command-line entry point.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage or configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lsv_lab::ensembles::{GenuinelyComplexSpec, ScalarDistribution};
use lsv_lab::experiments::{self, singularity_count, ExperimentConfig, Provenance};
use lsv_lab::lcd::{complex_lcd_with, real_lcd_with, LcdParams, SearchOptions};
use lsv_lab::matrix_file::{format_complex, Field, MatrixFile};
use lsv_lab::rng::StreamKey;
use lsv_lab::{smallball, spectra, Error};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "lsv-lab", version, about = "Random matrix laboratory: experiments and single-shot analyses")]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to `output_path` from the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// LCD of a unit vector read from a matrix file (one row or column).
    Lcd {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        /// Defaults to 0.2·√n.
        #[arg(long)]
        alpha: Option<f64>,
        /// Defaults to 10³·√n.
        #[arg(long)]
        search_bound: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        resolution: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lévy concentration of a coefficient vector; real files use the real
    /// law directly, complex files the genuinely complex law.
    Levy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Law::Rademacher)]
        distribution: Law,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues, singular values and condition number of a square matrix.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive singularity count of ±1±i matrices (n = 2 or 3).
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Law {
    Rademacher,
    Gaussian,
    Uniform,
}

impl Law {
    fn scalar(self) -> ScalarDistribution {
        match self {
            Law::Rademacher => ScalarDistribution::rademacher(),
            Law::Gaussian => ScalarDistribution::standard_gaussian(),
            Law::Uniform => ScalarDistribution::uniform_symmetric(),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

fn read_input(path: &Path) -> lsv_lab::Result<MatrixFile> {
    match MatrixFile::read(path) {
        Err(Error::Io(e)) => Err(Error::Config(format!("cannot read {}: {e}", path.display()))),
        other => other,
    }
}

fn emit(value: &Value, out: Option<&Path>, file: &str) -> lsv_lab::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(file), &text)?;
    }
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> lsv_lab::Result<()> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            let provenance = Provenance::with_override(&mut cfg, seed);
            let out_dir = out
                .or_else(|| cfg.output_path.as_ref().map(PathBuf::from))
                .ok_or_else(|| Error::Config("no output directory: pass --out or set output_path".into()))?;
            let output = experiments::run_experiment(&cfg)?;
            let manifest = experiments::write_outputs(&output, &cfg, &provenance, &out_dir)?;
            emit(
                &json!({ "experiment": output.experiment, "out_dir": out_dir, "manifest": manifest }),
                None,
                "",
            )
        }
        Command::Lcd {
            input,
            gamma,
            alpha,
            search_bound,
            resolution,
            out,
        } => {
            let file = read_input(&input)?;
            let v = file.as_vector()?;
            let n = v.len();
            let params = LcdParams::new(alpha.unwrap_or(0.2 * (n as f64).sqrt()), gamma)?;
            let mut opts = SearchOptions::for_dim(n);
            opts.resolution = resolution;
            if let Some(b) = search_bound {
                opts.search_bound = b;
            }
            let result = if file.field == Field::Real {
                let re: Vec<f64> = v.iter().map(|z| z.re).collect();
                real_lcd_with(&re, &params, &opts)?
            } else {
                complex_lcd_with(&v, &params, &opts)?
            };
            emit(
                &json!({ "n": n, "field": file.field, "params": params, "search": opts, "result": result }),
                out.as_deref(),
                "lcd.json",
            )
        }
        Command::Levy {
            input,
            epsilon,
            trials,
            seed,
            distribution,
            out,
        } => {
            let file = read_input(&input)?;
            let v = file.as_vector()?;
            let key = StreamKey::new(seed, "cli/levy");
            let estimate = if file.field == Field::Real {
                let a: Vec<f64> = v.iter().map(|z| z.re).collect();
                smallball::levy_1d(&a, &distribution.scalar(), epsilon, trials, &key)?
            } else {
                let spec = GenuinelyComplexSpec::new(distribution.scalar());
                smallball::levy_2d(&v, &spec, epsilon, trials, &key)?
            };
            emit(
                &json!({ "n": v.len(), "field": file.field, "distribution": format!("{distribution:?}").to_lowercase(), "seed": seed, "estimate": estimate }),
                out.as_deref(),
                "levy.json",
            )
        }
        Command::Spectrum { input, out } => {
            let file = read_input(&input)?;
            let a = &file.data;
            let spectrum = spectra::eigenvalues(a)?;
            let singular = spectra::singular_values(a)?;
            let mut report = json!({
                "rows": file.rows(),
                "cols": file.cols(),
                "eigenvalues": spectrum.eigenvalues.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "eigenvalues_text": spectrum.eigenvalues.iter().map(|&z| format_complex(z)).collect::<Vec<_>>(),
                "backward_error": spectrum.backward_error,
                "singular_values": singular.values,
                "condition_number": spectra::condition_number(a)?,
                "real_axis_distance": spectra::real_axis_distance(a)?,
            });
            if let Some(real) = file.as_real() {
                report["real_eigenvalues"] = json!(spectra::real_eigenvalue_count(&real)?);
            }
            emit(&report, out.as_deref(), "spectrum.json")
        }
        Command::Enumerate { n, out } => {
            let count = singularity_count(n)?;
            emit(&json!(count), out.as_deref(), "enumeration.json")
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
