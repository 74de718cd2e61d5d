//! Command-line driver for the BPF Helmholtz solvers.
//!
//! Subcommands `exactness`, `convergence`, `table`, `compare` and `verify`
//! write CSV to stdout or `--out`. Exit codes: 0 success, 1 failed check,
//! 2 usage error, 3 numerical guard (Nyquist band edge or resonance).

mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use anyhow::Context;
use clap::Parser;

pub use args::{parse_count, parse_real, Cli, Command, Options, DEFAULT_SEED};
pub use commands::{run, Report};
pub use output::real;

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL_GUARD: i32 = 3;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(bpf_helmholtz::Error),
    Io(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bpf_helmholtz::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Solver(e) if e.is_numerical_guard() => exit::NUMERICAL_GUARD,
            CliError::Solver(E::InvalidInput(_) | E::InvalidGrid(_) | E::NonNestedGrids { .. }) => {
                exit::USAGE
            }
            CliError::Solver(_) | CliError::Io(_) => exit::CHECK_FAILED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<bpf_helmholtz::Error> for CliError {
    fn from(e: bpf_helmholtz::Error) -> Self {
        CliError::Solver(e)
    }
}

/// Parses `args`, runs the command and writes its CSV. Returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = run(&cli.command, &cli.opts).and_then(|report| {
        emit(&cli.opts, &report, stdout)?;
        Ok(report)
    });
    match result {
        Ok(report) if report.passed => exit::SUCCESS,
        Ok(report) => {
            if let Some(s) = report.summary {
                let _ = writeln!(stderr, "check failed: {s}");
            }
            exit::CHECK_FAILED
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(opts: &Options, report: &Report, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &opts.out {
        Some(path) => std::fs::write(path, &report.csv)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(CliError::Io),
        None => stdout
            .write_all(report.csv.as_bytes())
            .context("writing to stdout")
            .map_err(CliError::Io),
    }
}
