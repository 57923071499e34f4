//! Batch front end: `symheat <subcommand> [--config FILE] [--out DIR] [--threads N]`.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 config error, 3 numerical failure.
//! `selftest` exits 0 exactly when every invariant passes.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod selftest;

use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use config::{echo, parse_config_for, Experiment};
use error::{CliError, EXIT_CONFIG, EXIT_NUMERICAL};

#[derive(Debug, Parser)]
#[command(name = "symheat", version, about = "L^p heat asymptotics on rank-one symmetric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat `key = value` config; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV, plot scripts and metadata.
    #[arg(long, global = true, default_value = "symheat-out")]
    pub out: PathBuf,
    /// Worker threads (0 means one per core).
    #[arg(long, global = true, env = "SYMHEAT_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Spherical functions φ_λ(r) on a λ × r table.
    Spherical,
    /// Heat and fractional heat kernel values.
    Heat,
    /// Convolution ratio ‖f ∗ h_t^α − z h_t^α‖_p / ‖h_t^α‖_p along a t-ladder.
    Ratio,
    /// ‖f ∗ h_t^α‖_p / ‖h_t^α‖_p against the theorem's constant.
    Extremizer,
    /// Tail mass of h_t^p outside the concentration region.
    Concentration,
    /// t^θ times the p = 2 ratio for f = h_1.
    Sharpness,
    /// Ball-average ratios, witness bounds and ball norm slopes.
    Ball,
    /// Fitted exponential rates and polynomial orders of ‖h_t^α‖_p.
    Normfit,
    /// Runs the invariant suite and prints one line per invariant.
    Selftest,
}

impl Command {
    pub fn experiment(self) -> Experiment {
        match self {
            Self::Spherical => Experiment::Spherical,
            Self::Heat => Experiment::Heat,
            Self::Ratio => Experiment::Ratio,
            Self::Extremizer => Experiment::Extremizer,
            Self::Concentration => Experiment::Concentration,
            Self::Sharpness => Experiment::Sharpness,
            Self::Ball => Experiment::Ball,
            Self::Normfit => Experiment::Normfit,
            Self::Selftest => Experiment::Selftest,
        }
    }
}

/// Parses arguments, runs, and returns the process exit code. Progress and
/// errors go to `err`; selftest lines and written paths go to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "symheat: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Config { key: "--config".into(), message: format!("{}: {e}", path.display()) })?,
        None => String::new(),
    };
    let cfg = parse_config_for(&text, Some(cli.command.experiment()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config { key: "--threads".into(), message: e.to_string() })?;

    if cfg.experiment == Experiment::Selftest {
        let checks = pool.install(|| selftest::run_selftest(&cfg));
        for c in &checks {
            let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let failed = checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(out, "{} passed, {failed} failed", checks.len() - failed);
        return Ok(if failed == 0 { 0 } else { EXIT_NUMERICAL });
    }

    let outputs = pool.install(|| runner::run_experiment(&cfg))?;
    let written = output::write_all(&cli.out, cfg.experiment.name(), &echo(&cfg), &outputs)?;
    for p in written {
        let _ = writeln!(out, "{}", p.display());
    }
    Ok(0)
}
