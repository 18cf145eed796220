//! `orlicz`: evaluate weight sequences, their N-functions and growth
//! conditions from the command line.
//!
//! Exit codes: 0 success, 1 I/O failure or audit violation, 2 input error,
//! 3 argument outside the trusted range.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orlicz_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "orlicz",
    version,
    about = "Weight sequences, N-functions and growth conditions"
)]
pub struct Cli {
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SeqArg {
    /// Sequence spec `family:key=value,...` or `@file.json`.
    #[arg(long)]
    pub seq: String,
    /// Horizon used when the sequence description does not fix one.
    #[arg(long, default_value_t = 256)]
    pub horizon: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate Σ_M, ω_M, φ_{ω_M} or ω̃_M on a grid.
    Eval {
        #[arg(long = "fn", value_enum)]
        func: EvalFn,
        #[command(flatten)]
        seq: SeqArg,
        /// `start:end:step`, end inclusive
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
    /// Compare the N-functions of two sequences.
    Relate {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long, default_value_t = 256)]
        horizon: usize,
        /// preceq_c, sim_c, preceq, sim, ess or little_o
        #[arg(long)]
        relation: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        report: Format,
    },
    /// Tabulate the complementary function of F_M by one route.
    Conjugate {
        #[command(flatten)]
        seq: SeqArg,
        /// right_inverse, young or legendre
        #[arg(long, default_value = "legendre")]
        route: String,
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
    /// Dual sequence data.
    Dual {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long, value_enum, default_value_t = DualEmit::Quotients)]
        emit: DualEmit,
        /// grid for `--emit sigma`
        #[arg(long)]
        grid: Option<String>,
        /// grid size for `--emit sandwich`
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
    /// Associated weight sequence of an N-function given as an expression in t.
    FromNfunction {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = NEmit::Sequence)]
        emit: NEmit,
        #[arg(long, default_value_t = 2000)]
        points: usize,
    },
    /// Growth-condition verdicts for one sequence.
    Check {
        #[command(flatten)]
        seq: SeqArg,
        /// comma-separated subset of mg,delta2,nabla2,deltasq,delta3,deltaprime
        #[arg(long)]
        conditions: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Implication audit over the built-in families, random sequences and
    /// any sequences given with --seq.
    Audit {
        #[arg(long)]
        seq: Vec<String>,
        #[arg(long, default_value_t = 100)]
        random: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        out: Format,
    },
    /// Built-in families with observed and expected verdicts.
    Families {
        #[arg(long, default_value_t = 256)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        out: Format,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalFn {
    Sigma,
    Omega,
    Phi,
    OmegaTilde,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualEmit {
    Quotients,
    Sigma,
    Sandwich,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NEmit {
    Sequence,
    Trace,
    Sandwich,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
    AuditViolation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(
                Error::DomainExceeded { .. }
                | Error::IndexExceeded { .. }
                | Error::SlopeExceeded { .. },
            ) => 3,
            Failure::Core(_) | Failure::Usage(_) => 2,
            Failure::Io(_) | Failure::AuditViolation => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result =
        commands::run(&cli.command).and_then(|text| output::emit(cli.output.as_deref(), &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::AuditViolation => eprintln!("error: implication audit found violations"),
            }
            ExitCode::from(f.code())
        }
    }
}
