//! `priced-sort`: generate priced bichromatic instances, run the sorting
//! algorithms against them, sweep parameter grids into CSV, and verify the
//! implementation on exhaustive small instances.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 price-regime
//! mismatch, 4 invariant violation (wrong output or a failed internal
//! check), 1 for I/O failures.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod generate;
mod run;
mod sweep;
mod util;
mod verify;

#[derive(Parser)]
#[command(name = "priced-sort", version, about = "Sorting under color-dependent comparison prices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file with a controlled stripe pattern
    Generate(generate::GenerateArgs),
    /// Run one algorithm on an instance file and print a CSV row
    Run(run::RunArgs),
    /// Run a grid of (size, prices, pattern, seed) cells and emit a CSV table
    Sweep(sweep::SweepArgs),
    /// Exhaustively check small instances and internal invariants
    Verify(verify::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate::execute(args),
        Command::Run(args) => run::execute(args),
        Command::Sweep(args) => sweep::execute(args),
        Command::Verify(args) => verify::execute(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
