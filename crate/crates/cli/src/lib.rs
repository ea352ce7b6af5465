//! `psikit` command-line front end.
//!
//! Exit codes: 0 success, 1 failed check, 2 invalid configuration or arguments,
//! 3 point (or sweep segment) not interior, 4 numerical failure, 5 multi-start disagreement.

pub mod checks;
pub mod commands;
pub mod config;
pub mod output;
pub mod shapes;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use psikit_core::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidDomain(_)
            | Error::DegenerateDomain(_)
            | Error::EmptyInterior
            | Error::DimensionMismatch { .. }
            | Error::UnsupportedDimension { .. }
            | Error::NonConvexDomain
            | Error::InvalidProfile(_)
            | Error::InvalidArgument(_)
            | Error::RadiusOutsideRings(_)
            | Error::CutoffTooSmall { .. } => 2,
            Error::PointNotInterior | Error::TooCloseToBoundary { .. } | Error::StepExitsDomain { .. } => 3,
            Error::DisagreementExceedsTolerance { .. } => 5,
            Error::NormalsUnavailable
            | Error::HessianUnavailable
            | Error::NonFiniteSample { .. }
            | Error::BracketSignFailure { .. }
            | Error::MaxIterations(_)
            | Error::LineSearchStall { .. } => 4,
        };
        CliError::new(code, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "psikit", version, about = "Boundary-distance functional toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate psi, its gradient and Hessian at a point.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Locate the critical point and audit uniqueness from random starts.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Number of random starts; 0 runs a single search from the default start point.
        #[arg(long, default_value_t = 8)]
        starts: usize,
        /// Relative gradient tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Critical radii of concentric annuli from the Gegenbauer series.
    Annulus {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Rings as "a1,b1;a2,b2;...".
        #[arg(long)]
        rings: String,
        /// Fixed number of series terms (automatic if omitted).
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Write psi and |grad psi| along a segment as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Brute-force Cartesian estimate of psi, or the radial derivative on a ball.
    Oracle {
        #[arg(long, required_unless_present = "ball_radius")]
        config: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, requires = "config")]
        point: Option<String>,
        #[arg(long, default_value_t = 1 << 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cutoff radius (defaults to four bounding radii).
        #[arg(long)]
        r_out: Option<f64>,
        /// Ball radius R for the radial-derivative formula.
        #[arg(long, conflicts_with = "config", requires = "radius")]
        ball_radius: Option<f64>,
        /// Distance r from the ball center.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Gauss-Legendre points per panel.
        #[arg(long, default_value_t = 24)]
        points: usize,
    },
    /// Run invariant suites and report pass/fail per invariant.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn configure_threads() {
    let var = std::env::var("PSIKIT_THREADS").ok();
    if let Some(n) = var.and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        // ignore failure if a pool already exists (e.g. repeated calls in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
