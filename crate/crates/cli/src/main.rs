use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qmstat::scenario::{self, ScenarioConfig};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qmstat", version, about = "Quantum measurement statistics on a 1-D grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write the JSON report (and field CSV if configured).
    Simulate { config: PathBuf },
    /// Compare the numerical pipeline with the closed-form results.
    Verify { config: PathBuf },
    /// Run a row-major grid of device widths and write one CSV row per point.
    Sweep {
        config: PathBuf,
        /// Density widths, comma separated or repeated.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        sigma: Vec<f64>,
        /// Current widths, comma separated or repeated.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        lambda: Vec<f64>,
    },
    /// Draw seeded position samples from the recorded density.
    Sample { config: PathBuf },
}

/// Errors from loading the config, kept apart so they always map to exit 2.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn load(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(ConfigError)?;
    let config = ScenarioConfig::from_json(&text)
        .and_then(|c| c.validate().map(|_| c))
        .with_context(|| format!("config {}", path.display()))
        .map_err(ConfigError)?;
    Ok(config)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Writes JSON to `path`, or to stdout when no path is configured.
fn emit_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn simulate(path: &Path) -> Result<ExitCode> {
    let config = load(path)?;
    let run = scenario::run_scenario(&config)?;
    emit_json(&run.output(&config), config.output.report.as_deref())?;
    if let Some(p) = &config.output.fields_csv {
        run.write_fields_csv(create(p)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(path: &Path) -> Result<ExitCode> {
    let config = load(path)?;
    let outcome = scenario::verify(&config)?;
    emit_json(&outcome, config.output.report.as_deref())?;
    if outcome.passed {
        return Ok(ExitCode::SUCCESS);
    }
    for row in outcome.failing() {
        let err = match row.rel_error {
            Some(r) => format!("rel error {r:.3e}"),
            None => format!("abs error {:.3e}", row.abs_error),
        };
        eprintln!(
            "verify: {} numeric {} vs analytic {} ({err}, tolerance {:.1e})",
            row.field, row.numeric, row.analytic, row.tolerance
        );
    }
    Ok(ExitCode::from(EXIT_VERIFY_FAILED))
}

fn sweep(path: &Path, sigmas: &[f64], lambdas: &[f64]) -> Result<ExitCode> {
    let config = load(path)?;
    let rows = scenario::sweep(&config, sigmas, lambdas)?;
    match &config.output.sweep_csv {
        Some(p) => scenario::write_sweep_csv(&rows, create(p)?)?,
        None => scenario::write_sweep_csv(&rows, io::stdout().lock())?,
    }
    for row in rows.iter().filter(|r| !r.valid) {
        eprintln!(
            "sweep: point {} (sigma={}, lambda={}) flagged: {}",
            row.index,
            row.sigma,
            row.lambda,
            row.flag.as_deref().unwrap_or("unknown")
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn sample(path: &Path) -> Result<ExitCode> {
    let config = load(path)?;
    let run = scenario::sample(&config)?;
    if let Some(p) = &config.output.samples_csv {
        run.samples.write_csv(create(p)?, config.display_name())?;
    }
    emit_json(&run.summary(&config), config.output.report.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match err.downcast_ref::<qmstat::Error>() {
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config } => simulate(config),
        Command::Verify { config } => verify(config),
        Command::Sweep { config, sigma, lambda } => sweep(config, sigma, lambda),
        Command::Sample { config } => sample(config),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            let check = err
                .downcast_ref::<qmstat::Error>()
                .map(|e| e.check_name())
                .unwrap_or("config");
            eprintln!("error [{check}]: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
