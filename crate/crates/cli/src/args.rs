use std::path::PathBuf;

use bpf_helmholtz::analysis::{Norm, Suite};
use bpf_helmholtz::{Benchmark, SchemeKind};
use clap::{Args, Parser, Subcommand};

/// Seed used by `verify` when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "bpf-helmholtz",
    version,
    about = "Solve 1D impedance Helmholtz benchmarks with the BPF, FD and FD-DC schemes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// BPF on the plane wave 2e^{ikx} + e^{-ikx}; fails above the tolerance.
    Exactness,
    /// Relative L∞ and V errors under refinement, with fitted rates.
    Convergence,
    /// Relative error matrix over k × h, with a per-diagonal summary.
    Table,
    /// Relative errors of several schemes along fixed kh.
    Compare,
    /// Run one verification suite.
    Verify {
        /// identities, multipliers, residuals or stability
        suite: Suite,
    },
}

/// Flags shared by all subcommands. Numbers accept `a^b`, e.g. `2^7`.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Wavenumber.
    #[arg(long, global = true, value_parser = parse_real)]
    pub k: Option<f64>,

    /// Comma-separated wavenumbers.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_real)]
    pub k_list: Option<Vec<f64>>,

    /// Number of subintervals.
    #[arg(long, global = true, value_parser = parse_count)]
    pub n: Option<usize>,

    /// Comma-separated numbers of subintervals.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_count)]
    pub n_list: Option<Vec<usize>>,

    /// Comma-separated grid spacings, converted to n = L/h.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_real)]
    pub h_list: Option<Vec<f64>>,

    /// Comma-separated values of kh for `compare`.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_real)]
    pub kh_list: Option<Vec<f64>>,

    /// bpf, fd or fd-dc; `compare` takes a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    pub scheme: Option<Vec<SchemeKind>>,

    /// planewave, smooth, box or sine2.
    #[arg(long, global = true)]
    pub benchmark: Option<Benchmark>,

    /// linf, l2h, h1 or v.
    #[arg(long, global = true)]
    pub norm: Option<Norm>,

    /// Subintervals of the fine BPF reference.
    #[arg(long, global = true, value_parser = parse_count)]
    pub n_ref: Option<usize>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Guard band around kh ∈ π·ℤ, as a fraction of π.
    #[arg(long, global = true, value_parser = parse_real)]
    pub nyquist_tol: Option<f64>,

    /// Pass threshold for `exactness`.
    #[arg(long, global = true, value_parser = parse_real)]
    pub tol: Option<f64>,
}

fn split_power(s: &str) -> Option<(&str, &str)> {
    s.split_once('^')
}

/// A real number, or `a^b`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match split_power(s) {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("'{s}': {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("'{s}': {e}"))?;
            a.powf(b)
        }
        None => s.parse().map_err(|e| format!("'{s}': {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// A positive integer, or `a^b` with integer `a`, `b`.
pub fn parse_count(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let v = match split_power(s) {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|e| format!("'{s}': {e}"))?;
            let b: u32 = b.trim().parse().map_err(|e| format!("'{s}': {e}"))?;
            a.checked_pow(b).ok_or_else(|| format!("'{s}' overflows"))?
        }
        None => s.parse().map_err(|e| format!("'{s}': {e}"))?,
    };
    if v == 0 {
        return Err("grid sizes must be positive".into());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_parse() {
        assert_eq!(parse_real("2^7").unwrap(), 128.0);
        assert_eq!(parse_real("0.5").unwrap(), 0.5);
        assert_eq!(parse_real("2^-3").unwrap(), 0.125);
        assert_eq!(parse_count("3^5").unwrap(), 243);
        assert!(parse_count("0").is_err());
        assert!(parse_count("2^-1").is_err());
        assert!(parse_real("").is_err());
    }

    #[test]
    fn flags_parse_in_any_position() {
        let cli = Cli::try_parse_from([
            "bpf-helmholtz",
            "--k",
            "2^5",
            "convergence",
            "--n-list",
            "3^5,3^6",
            "--scheme",
            "fd-dc",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Convergence));
        assert_eq!(cli.opts.k, Some(32.0));
        assert_eq!(cli.opts.n_list, Some(vec![243, 729]));
        assert_eq!(
            cli.opts.scheme,
            Some(vec![SchemeKind::DispersionCorrectedFd])
        );
    }

    #[test]
    fn verify_takes_a_suite() {
        let cli = Cli::try_parse_from(["bpf-helmholtz", "verify", "stability"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Verify {
                suite: Suite::Stability
            }
        ));
        assert!(Cli::try_parse_from(["bpf-helmholtz", "verify", "nothing"]).is_err());
    }
}
