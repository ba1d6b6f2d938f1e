//! `rcom`: Riemannian centres of mass with signed weights.
//!
//! Exit codes: 0 success, 1 bad input, 2 certificate failure or check not
//! applicable, 3 numerical failure or facet violation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod input;
mod sweep;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "rcom", version, about = "Centres of mass for signed measures on constant-curvature spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the certified centre of mass of a measure file.
    Mean {
        input: PathBuf,
        #[command(flatten)]
        ball: BallArgs,
        /// Run the solver even when the certificate fails.
        #[arg(long)]
        force: bool,
    },
    /// Report every certificate that applies to a measure or simplex file.
    Certify {
        input: PathBuf,
        #[command(flatten)]
        ball: BallArgs,
        /// Chart scale factor `s ≥ 1` (simplex files).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Brute-force grid minimization of the energy on the ball.
    Oracle {
        input: PathBuf,
        #[command(flatten)]
        ball: BallArgs,
        /// Final grid spacing; defaults to 1e-3·ρ.
        #[arg(long)]
        resolution: Option<f64>,
    },
    /// Certificate margins and empirical convexity over a parameter grid.
    Sweep(sweep::SweepArgs),
    /// Check that two simplices sharing a facet have charts on opposite sides.
    FacetCheck {
        first: PathBuf,
        second: PathBuf,
        /// Random barycentric samples on top of the lattice.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.5)]
        scale: f64,
    },
}

/// Ball and curvature overrides shared by the measure commands.
#[derive(Debug, Clone, Args)]
struct BallArgs {
    /// Ball radius; defaults to the file's `rho`, then to the smallest
    /// certified radius found by a geometric search.
    #[arg(long)]
    rho: Option<f64>,
    /// Injectivity radius; defaults to that of the model space.
    #[arg(long)]
    iota: Option<f64>,
    /// Lower curvature bound; defaults to the space's curvature.
    #[arg(long, allow_hyphen_values = true)]
    lambda_lo: Option<f64>,
    /// Upper curvature bound; defaults to the space's curvature.
    #[arg(long, allow_hyphen_values = true)]
    lambda_hi: Option<f64>,
}

#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn parse(message: impl fmt::Display) -> Self {
        Self { code: 1, message: message.to_string() }
    }

    pub fn certificate(message: impl fmt::Display) -> Self {
        Self { code: 2, message: message.to_string() }
    }

    pub fn numeric(message: impl fmt::Display) -> Self {
        Self { code: 3, message: message.to_string() }
    }
}

impl From<rcom::Error> for Failure {
    fn from(e: rcom::Error) -> Self {
        use rcom::Error::*;
        match e {
            CertificateFailed(_) => Failure::certificate(e),
            MaxIterations { .. }
            | StepCollapsed { .. }
            | SingularSystem(_)
            | OutsideDomain { .. }
            | Antipodal
            | BeyondInjectivityRadius { .. } => Failure::numeric(e),
            _ => Failure::parse(e),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Mean { input, ball, force } => commands::mean(&input, &ball, force),
        Command::Certify { input, ball, scale } => commands::certify(&input, &ball, scale),
        Command::Oracle { input, ball, resolution } => commands::oracle(&input, &ball, resolution),
        Command::Sweep(args) => sweep::run(&args),
        Command::FacetCheck { first, second, samples, seed, scale } => {
            commands::facet_check(&first, &second, samples, seed, scale)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
