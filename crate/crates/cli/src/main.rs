//! `biortho-dqpt`: quench observables, Fisher zeros, phase diagrams and the
//! quench catalog as CSV/JSON run directories.
//!
//! Exit status: 0 success, 1 numerical failure or failed comparison,
//! 2 invalid input, 3 refusal at a phase boundary or exceptional point.

mod commands;
mod config;
mod failure;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BranchArgs, Common, PhaseArgs, QuenchArgs, TableArgs};
use failure::{CmdResult, Failure};

/// Environment variable capping the worker count.
const THREADS_VAR: &str = "BIORTHO_DQPT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "biortho-dqpt",
    version,
    about = "Biorthogonal DQPTs in the non-Hermitian SSH model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Loschmidt rates and DTOP of one quench: rate.csv, dtop.csv, cusps.csv, jumps.csv.
    Quench {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: QuenchArgs,
    },
    /// Fisher-zero branches and their real-time crossings: fisher.csv, crossings.csv.
    Fisher {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: QuenchArgs,
        #[command(flatten)]
        branches: BranchArgs,
    },
    /// Region labels and winding numbers on an (eta, gamma) grid: phases.csv.
    PhaseDiagram {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: PhaseArgs,
    },
    /// The worked two-level example at t = 1, checked against its reference values.
    SmExample {
        #[command(flatten)]
        common: Common,
    },
    /// Crossing counts and DTOP jump sets of the quench catalog: table_s1.csv.
    TableS1 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: QuenchArgs,
        #[command(flatten)]
        branches: BranchArgs,
        #[command(flatten)]
        table: TableArgs,
    },
}

fn configure_threads() -> CmdResult {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Failed(format!("cannot start {threads} workers: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    configure_threads()?;
    match cli.command {
        Command::Quench { common, args } => commands::quench(&common, &args),
        Command::Fisher { common, args, branches } => commands::fisher(&common, &args, &branches),
        Command::PhaseDiagram { common, args } => commands::phase_diagram(&common, &args),
        Command::SmExample { common } => commands::sm_example(&common),
        Command::TableS1 {
            common,
            args,
            branches,
            table,
        } => commands::table_s1(&common, &args, &branches, &table),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
