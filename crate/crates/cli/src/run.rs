//! `priced-sort run`: run one algorithm on an instance file, verify the
//! output against ground truth, and print one CSV row.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use priced_sort::driver::{inversion_sort_with, RunError, RunOptions, SortRun};
use priced_sort::instrument::true_sorted;
use priced_sort::variants::{multichromatic_sort, sort_both_then_merge, sort_middle_regime};

use crate::util::{csv_row, load_instance, CliError, LoadedInstance, CSV_HEADER};

#[derive(Args)]
pub struct RunArgs {
    /// Instance file
    #[arg(long)]
    instance: PathBuf,
    /// Algorithm: inversion_sort | sort_both_then_merge | sort_middle_regime | multichromatic
    #[arg(long, default_value = "inversion_sort")]
    algo: String,
    /// Run seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write a per-round trace (`round active unaffected inversions pivot_charges`)
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also interleave backbone snapshots into the trace file
    #[arg(long)]
    trace_snapshots: bool,
    /// Print the CSV header line before the row
    #[arg(long)]
    header: bool,
    /// Pattern label for the CSV row
    #[arg(long, default_value = "file")]
    label: String,
    /// Enable the extra cross probes against opposite sample extremes
    #[arg(long)]
    cross_probe: bool,
}

pub fn execute(args: RunArgs) -> Result<(), CliError> {
    let loaded = load_instance(&args.instance)?;
    if args.header {
        println!("{CSV_HEADER}");
    }
    match (args.algo.as_str(), loaded) {
        ("inversion_sort", LoadedInstance::Bichromatic(instance)) => {
            let opts = RunOptions {
                record_rounds: args.trace.is_some(),
                record_snapshots: args.trace_snapshots,
                extra_cross_probe: args.cross_probe,
                ..Default::default()
            };
            let run = inversion_sort_with(&instance, args.seed, &opts).map_err(map_run_err)?;
            if run.order != true_sorted(&instance) {
                return Err(CliError::Invariant(
                    "output does not match the true sorted order".into(),
                ));
            }
            if let Some(path) = &args.trace {
                write_trace(path, &run)?;
            }
            println!(
                "{}",
                csv_row(
                    "inversion_sort",
                    instance.len(),
                    instance.n_red(),
                    instance.n_blue(),
                    &instance.alpha().display_decimal(),
                    &instance.beta().display_decimal(),
                    &args.label,
                    args.seed,
                    &run.report,
                )
            );
            Ok(())
        }
        (algo @ ("sort_both_then_merge" | "sort_middle_regime"), LoadedInstance::Bichromatic(instance)) => {
            if args.trace.is_some() {
                return Err(CliError::Usage(
                    "--trace is only available for inversion_sort".into(),
                ));
            }
            let run = match algo {
                "sort_both_then_merge" => sort_both_then_merge(&instance, args.seed),
                _ => sort_middle_regime(&instance, args.seed),
            }
            .map_err(|e| CliError::Regime(e.to_string()))?;
            if run.order != true_sorted(&instance) {
                return Err(CliError::Invariant(
                    "output does not match the true sorted order".into(),
                ));
            }
            println!(
                "{}",
                csv_row(
                    algo,
                    instance.len(),
                    instance.n_red(),
                    instance.n_blue(),
                    &instance.alpha().display_decimal(),
                    &instance.beta().display_decimal(),
                    &args.label,
                    args.seed,
                    &run.report,
                )
            );
            Ok(())
        }
        ("multichromatic", LoadedInstance::Multichromatic(instance)) => {
            if args.trace.is_some() {
                return Err(CliError::Usage(
                    "--trace is only available for inversion_sort".into(),
                ));
            }
            let run = multichromatic_sort(&instance, args.seed)
                .map_err(|e| CliError::Regime(e.to_string()))?;
            if run.order != instance.true_sorted() {
                return Err(CliError::Invariant(
                    "output does not match the true sorted order".into(),
                ));
            }
            println!(
                "{}",
                csv_row(
                    "multichromatic",
                    instance.len(),
                    0,
                    0,
                    "-",
                    "-",
                    &args.label,
                    args.seed,
                    &run.report,
                )
            );
            Ok(())
        }
        ("inversion_sort" | "sort_both_then_merge" | "sort_middle_regime", LoadedInstance::Multichromatic(_)) => {
            Err(CliError::Usage(format!(
                "{} expects a bichromatic instance file, got a multichromatic one",
                args.algo
            )))
        }
        ("multichromatic", LoadedInstance::Bichromatic(_)) => Err(CliError::Usage(
            "multichromatic expects a `N k gamma..` instance file".into(),
        )),
        (other, _) => Err(CliError::Usage(format!("unknown algorithm `{other}`"))),
    }
}

fn map_run_err(err: RunError) -> CliError {
    match err {
        RunError::Regime { .. } => CliError::Regime(err.to_string()),
        RunError::Invariant { .. } | RunError::Internal(_) => CliError::Invariant(err.to_string()),
        RunError::RoundCap { .. } => CliError::Invariant(err.to_string()),
    }
}

fn write_trace(path: &PathBuf, run: &SortRun) -> Result<(), CliError> {
    let mut out = Vec::new();
    for (i, t) in run.trace.iter().enumerate() {
        writeln!(out, "{} {} {} {} {}", t.round, t.active, t.unaffected, t.inversions, t.pivot_charges)
            .expect("write to vec");
        if let Some(snapshot) = run.snapshots.get(i) {
            writeln!(out, "# {snapshot}").expect("write to vec");
        }
    }
    std::fs::write(path, out).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}
