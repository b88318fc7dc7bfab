//! Batch front end: one TOML config drives weights, verification, sweeps
//! and a summary report.
//!
//! Exit codes: 0 success, 1 usage or config, 2 construction, 3 verification,
//! 4 solver.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

pub use commands::{cmd_report, cmd_sweep, cmd_verify, cmd_weights, Artifacts};
pub use config::{CertGrid, Certify, OutputSection, ProblemSection, ResolventSection, RunConfig, VerifySection, WeightsSection, CONFIG_SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CONSTRUCTION: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "workbench",
    about = "Weighted resolvent workbench: weight construction, margin certificates and h-sweeps",
    after_help = "Every config key has a default; run with --help-config for the full schema.\n\
                  Exit codes: 0 ok, 1 usage/config, 2 construction, 3 verification, 4 solver."
)]
struct Cli {
    /// Print the config schema with defaults and exit.
    #[arg(long)]
    help_config: bool,
    /// TOML run config; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `verify.tolerance`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build psi, phi, w, m, g and write tables plus the constants report.
    Weights,
    /// Margin reports for every pointwise inequality and the gluing constant.
    Verify,
    /// Weighted resolvent norms over the h list, with fits and plot data.
    Sweep {
        /// Turn the fit targets into exit-code checks.
        #[arg(long)]
        assert_fits: bool,
    },
    /// Aggregate earlier outputs into one summary.
    Report,
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if cli.help_config {
        print!("{CONFIG_SCHEMA}");
        return EXIT_OK;
    }
    let Some(command) = cli.command.take() else {
        eprintln!("error: a subcommand is required (weights, verify, sweep, report)");
        return EXIT_CONFIG;
    };
    let result = load_config(&cli).and_then(|cfg| match command {
        Command::Weights => cmd_weights(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::Sweep { assert_fits } => cmd_sweep(&cfg, assert_fits),
        Command::Report => cmd_report(&cfg),
    });
    match result {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &cli.out {
        cfg.output.dir = d.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tolerance {
        cfg.verify.tolerance = t;
    }
    cfg.validate()?;
    Ok(cfg)
}
