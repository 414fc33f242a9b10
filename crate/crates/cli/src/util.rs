//! Shared CLI plumbing: error-to-exit-code mapping, price parsing, CSV
//! formatting, and instance-file loading.

use std::fmt;
use std::path::Path;

use priced_sort::variants::MultiInstance;
use priced_sort::{Cost, PricedInstance, RunReport};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or malformed input files (exit 2).
    Usage(String),
    /// Prices outside the selected algorithm's regime (exit 3).
    Regime(String),
    /// Wrong output or a failed internal check (exit 4).
    Invariant(String),
    /// Filesystem trouble (exit 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Regime(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    pub fn io(context: &str, err: std::io::Error) -> CliError {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Regime(m) | CliError::Invariant(m) | CliError::Io(m) => {
                f.write_str(m)
            }
        }
    }
}

/// Parses a price token (`inf`, integer, or decimal).
pub fn parse_price(token: &str) -> Result<Cost, CliError> {
    token
        .parse::<Cost>()
        .map_err(|e| CliError::Usage(format!("bad price `{token}`: {e}")))
}

/// Fixed six-decimal rendering used for the ratio column.
pub fn format_fixed6(cost: Cost) -> String {
    match cost.as_finite() {
        None => "inf".to_string(),
        Some(r) => {
            const SCALE: i128 = 1_000_000;
            let units = (r.numer() * SCALE + r.denom() / 2) / r.denom();
            format!("{}.{:06}", units / SCALE, units % SCALE)
        }
    }
}

pub const CSV_HEADER: &str =
    "algo,N,n,m,alpha,beta,pattern,seed,total,pivot,search,cert,stripe,hamiltonian,ratio,rounds,height";

/// One CSV row in the fixed schema.
#[allow(clippy::too_many_arguments)]
pub fn csv_row(
    algo: &str,
    n_total: usize,
    n_red: usize,
    n_blue: usize,
    alpha: &str,
    beta: &str,
    pattern: &str,
    seed: u64,
    report: &RunReport,
) -> String {
    format!(
        "{algo},{n_total},{n_red},{n_blue},{alpha},{beta},{pattern},{seed},{},{},{},{},{},{},{},{},{}",
        report.total_cost,
        report.pivot_cost,
        report.search_cost,
        report.certificate_cost,
        report.stripe_sort_cost,
        report.hamiltonian,
        format_fixed6(report.ratio),
        report.rounds,
        report.tree_height,
    )
}

/// An instance file in either supported format.
pub enum LoadedInstance {
    Bichromatic(PricedInstance),
    Multichromatic(MultiInstance),
}

/// Loads an instance file, picking the format from the header: three tokens
/// (`N alpha beta`) for bichromatic, four or more (`N k gamma..`) for
/// multichromatic.
pub fn load_instance(path: &Path) -> Result<LoadedInstance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let header_tokens = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().count())
        .unwrap_or(0);
    if header_tokens == 3 {
        let instance = text
            .parse::<PricedInstance>()
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(LoadedInstance::Bichromatic(instance))
    } else if header_tokens >= 4 {
        let instance = text
            .parse::<MultiInstance>()
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(LoadedInstance::Multichromatic(instance))
    } else {
        Err(CliError::Usage(format!(
            "{}: unrecognized instance header (expected `N alpha beta` or `N k gamma..`)",
            path.display()
        )))
    }
}

/// Builds a rayon pool sized by `PRICED_SORT_THREADS` (0 or unset: default).
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var("PRICED_SORT_THREADS") {
        Err(_) => 0,
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("PRICED_SORT_THREADS must be a number, got `{v}`")))?,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("building thread pool: {e}")))
}
