//! `priced-sort sweep`: run a (size x prices x pattern x seed) grid,
//! verify every run, and emit one deterministic CSV table with per-cell
//! aggregates and the fitted competitive-ratio constant in the footer.

use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use priced_sort::driver::inversion_sort;
use priced_sort::gen::{generate, GenSpec, Pattern};
use priced_sort::instrument::true_sorted;
use priced_sort::variants::{
    multichromatic_sort, random_multi_instance, sort_both_then_merge, sort_middle_regime,
};
use priced_sort::{Cost, RunReport};

use crate::util::{csv_row, format_fixed6, parse_price, thread_pool, CliError, CSV_HEADER};

#[derive(Args)]
pub struct SweepArgs {
    /// Algorithm: inversion_sort | sort_both_then_merge | sort_middle_regime | multichromatic
    #[arg(long, default_value = "inversion_sort")]
    algo: String,
    /// Comma-separated instance sizes, e.g. 64,256,1024
    #[arg(long)]
    sizes: String,
    /// Comma-separated price pairs `alpha:beta` (single value for multichromatic), e.g. 2:2,inf:inf
    #[arg(long)]
    prices: String,
    /// Comma-separated patterns: uniform | alternating | few-long
    #[arg(long, default_value = "uniform")]
    patterns: String,
    /// Seeds per cell (0..seeds)
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Colors for multichromatic sweeps
    #[arg(long, default_value_t = 3)]
    colors: u16,
    /// Output file (stdout when absent)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PatternKind {
    Uniform,
    Alternating,
    FewLong,
}

impl PatternKind {
    fn label(self) -> &'static str {
        match self {
            PatternKind::Uniform => "uniform",
            PatternKind::Alternating => "alternating",
            PatternKind::FewLong => "few-long",
        }
    }
}

struct Cell {
    n_total: usize,
    alpha: Cost,
    beta: Cost,
    pattern: PatternKind,
}

struct RowOut {
    line: String,
    ratio: Cost,
    height: u32,
}

pub fn execute(args: SweepArgs) -> Result<(), CliError> {
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad size `{t}`"))))
        .collect::<Result<_, _>>()?;
    let prices: Vec<(Cost, Cost)> = args
        .prices
        .split(',')
        .map(|pair| match pair.split_once(':') {
            Some((a, b)) => Ok((parse_price(a)?, parse_price(b)?)),
            None => {
                let g = parse_price(pair)?;
                Ok((g, g))
            }
        })
        .collect::<Result<_, _>>()?;
    let patterns: Vec<PatternKind> = args
        .patterns
        .split(',')
        .map(|t| match t.trim() {
            "uniform" => Ok(PatternKind::Uniform),
            "alternating" => Ok(PatternKind::Alternating),
            "few-long" => Ok(PatternKind::FewLong),
            other => Err(CliError::Usage(format!("unknown pattern `{other}`"))),
        })
        .collect::<Result<_, _>>()?;
    if sizes.is_empty() || prices.is_empty() || patterns.is_empty() || args.seeds == 0 {
        return Err(CliError::Usage("sweep needs sizes, prices, patterns, and seeds".into()));
    }

    // Every cell must match the algorithm's regime before any run starts.
    for &(alpha, beta) in &prices {
        let ok = match args.algo.as_str() {
            "inversion_sort" => alpha > Cost::ONE && beta > Cost::ONE,
            "sort_both_then_merge" => alpha < Cost::ONE && beta < Cost::ONE,
            "sort_middle_regime" => {
                (alpha < Cost::ONE && beta > Cost::ONE) || (beta < Cost::ONE && alpha > Cost::ONE)
            }
            "multichromatic" => alpha > Cost::ONE && beta > Cost::ONE,
            other => return Err(CliError::Usage(format!("unknown algorithm `{other}`"))),
        };
        if !ok {
            return Err(CliError::Regime(format!(
                "price pair {}:{} is outside the regime of {}",
                alpha, beta, args.algo
            )));
        }
    }
    for &pattern in &patterns {
        if pattern == PatternKind::FewLong {
            for &n in &sizes {
                if n < 8 || n % 4 != 0 {
                    return Err(CliError::Usage(format!(
                        "pattern few-long needs sizes divisible by 4 and >= 8, got {n}"
                    )));
                }
            }
        }
    }

    let mut cells = Vec::new();
    for &n_total in &sizes {
        for &(alpha, beta) in &prices {
            for &pattern in &patterns {
                cells.push(Cell { n_total, alpha, beta, pattern });
            }
        }
    }
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..args.seeds).map(move |s| (c, s)))
        .collect();

    let algo = args.algo.clone();
    let colors = args.colors;
    let pool = thread_pool()?;
    let results: Result<Vec<RowOut>, CliError> = pool.install(|| {
        jobs.par_iter()
            .map(|&(cell_idx, seed)| run_job(&cells[cell_idx], seed, &algo, colors))
            .collect()
    });
    let results = results?;

    // Serialize in deterministic job order regardless of completion order.
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &results {
        out.push_str(&row.line);
        out.push('\n');
    }
    for (cell_idx, cell) in cells.iter().enumerate() {
        let rows = &results[cell_idx * args.seeds as usize..(cell_idx + 1) * args.seeds as usize];
        let mut ratios: Vec<Cost> = rows.iter().map(|r| r.ratio).collect();
        ratios.sort();
        let max_ratio = *ratios.last().unwrap();
        let median_ratio = ratios[(ratios.len() - 1) / 2];
        let max_height = rows.iter().map(|r| r.height).max().unwrap();
        out.push_str(&format!(
            "# cell algo={} N={} prices={}:{} pattern={} seeds={} max_ratio={} median_ratio={} max_height={}\n",
            args.algo,
            cell.n_total,
            cell.alpha,
            cell.beta,
            cell.pattern.label(),
            args.seeds,
            format_fixed6(max_ratio),
            format_fixed6(median_ratio),
            max_height,
        ));
    }
    out.push_str(&format!("# c_hat = {}\n", format_fixed6(fitted_constant(&cells, &results, args.seeds))));

    match &args.out {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?,
        None => print!("{out}"),
    }
    Ok(())
}

/// `max_ratio / ceil(log2 N)^3`, maximized over cells.
fn fitted_constant(cells: &[Cell], results: &[RowOut], seeds: u64) -> Cost {
    let mut best = Cost::ZERO;
    for (cell_idx, cell) in cells.iter().enumerate() {
        let rows = &results[cell_idx * seeds as usize..(cell_idx + 1) * seeds as usize];
        let max_ratio = rows.iter().map(|r| r.ratio).max().unwrap();
        let lg = log2_ceil(cell.n_total).max(1);
        let denom = Cost::from_int(lg * lg * lg);
        if let Some(c) = max_ratio.div(&denom) {
            if c > best {
                best = c;
            }
        }
    }
    best
}

pub fn log2_ceil(n: usize) -> u64 {
    let n = n.max(1) as u64;
    64 - (n - 1).leading_zeros() as u64
}

fn run_job(cell: &Cell, seed: u64, algo: &str, colors: u16) -> Result<RowOut, CliError> {
    let fail = |msg: String| {
        CliError::Invariant(format!(
            "cell N={} prices={}:{} pattern={} seed={seed}: {msg}",
            cell.n_total, cell.alpha, cell.beta, cell.pattern.label()
        ))
    };
    if algo == "multichromatic" {
        let gammas = vec![cell.alpha; colors as usize];
        let instance = random_multi_instance(cell.n_total, gammas, seed)
            .map_err(|e| fail(e.to_string()))?;
        let run = multichromatic_sort(&instance, seed).map_err(|e| fail(e.to_string()))?;
        if run.order != instance.true_sorted() {
            return Err(fail("output does not match the true sorted order".into()));
        }
        let line = csv_row(
            algo,
            cell.n_total,
            0,
            0,
            &cell.alpha.display_decimal(),
            &cell.alpha.display_decimal(),
            cell.pattern.label(),
            seed,
            &run.report,
        );
        return Ok(RowOut { line, ratio: run.report.ratio, height: 0 });
    }

    let n_red = cell.n_total / 2;
    let n_blue = cell.n_total - n_red;
    let pattern = match cell.pattern {
        PatternKind::Uniform => Pattern::UniformShuffle,
        PatternKind::Alternating => Pattern::Alternating,
        PatternKind::FewLong => Pattern::FewLongStripes { long_len: cell.n_total / 4 },
    };
    let spec = GenSpec { n_red, n_blue, alpha: cell.alpha, beta: cell.beta, pattern, seed };
    let instance = generate(&spec).map_err(|e| fail(e.to_string()))?;
    let (order, report): (Vec<priced_sort::KeyId>, RunReport) = match algo {
        "inversion_sort" => {
            let run = inversion_sort(&instance, seed).map_err(|e| fail(e.to_string()))?;
            (run.order, run.report)
        }
        "sort_both_then_merge" => {
            let run = sort_both_then_merge(&instance, seed).map_err(|e| fail(e.to_string()))?;
            (run.order, run.report)
        }
        _ => {
            let run = sort_middle_regime(&instance, seed).map_err(|e| fail(e.to_string()))?;
            (run.order, run.report)
        }
    };
    if order != true_sorted(&instance) {
        return Err(fail("output does not match the true sorted order".into()));
    }
    let line = csv_row(
        algo,
        cell.n_total,
        n_red,
        n_blue,
        &cell.alpha.display_decimal(),
        &cell.beta.display_decimal(),
        cell.pattern.label(),
        seed,
        &report,
    );
    Ok(RowOut { line, ratio: report.ratio, height: report.tree_height })
}
