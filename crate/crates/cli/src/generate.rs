//! `priced-sort generate`: write an instance file and print its summary.

use std::path::PathBuf;

use clap::Args;

use priced_sort::gen::{generate, GenSpec, Pattern};
use priced_sort::instrument::{hamiltonian_cost, stripes};
use priced_sort::Color;

use crate::util::{parse_price, CliError};

#[derive(Args)]
pub struct GenerateArgs {
    /// Stripe pattern: uniform | alternating | stripes | few-long
    #[arg(long)]
    pattern: String,
    /// Number of red keys
    #[arg(long)]
    n: usize,
    /// Number of blue keys
    #[arg(long)]
    m: usize,
    /// Red-red comparison price (decimal or `inf`)
    #[arg(long)]
    alpha: String,
    /// Blue-blue comparison price (decimal or `inf`)
    #[arg(long)]
    beta: String,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated red stripe lengths (pattern `stripes`)
    #[arg(long)]
    red_lens: Option<String>,
    /// Comma-separated blue stripe lengths (pattern `stripes`)
    #[arg(long)]
    blue_lens: Option<String>,
    /// Color of the first stripe (pattern `stripes`): red | blue
    #[arg(long, default_value = "red")]
    first: String,
    /// Length of the two long runs (pattern `few-long`)
    #[arg(long)]
    long_len: Option<usize>,
    /// Output file
    #[arg(short, long)]
    out: PathBuf,
}

fn parse_lens(arg: Option<&String>, flag: &str) -> Result<Vec<usize>, CliError> {
    let Some(arg) = arg else {
        return Err(CliError::Usage(format!("pattern `stripes` requires --{flag}")));
    };
    arg.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad stripe length `{t}` in --{flag}")))
        })
        .collect()
}

pub fn execute(args: GenerateArgs) -> Result<(), CliError> {
    let pattern = match args.pattern.as_str() {
        "uniform" => Pattern::UniformShuffle,
        "alternating" => Pattern::Alternating,
        "stripes" => {
            let first = match args.first.as_str() {
                "red" => Color::Red,
                "blue" => Color::Blue,
                other => return Err(CliError::Usage(format!("bad --first `{other}`"))),
            };
            Pattern::StripeLengths {
                first,
                red: parse_lens(args.red_lens.as_ref(), "red-lens")?,
                blue: parse_lens(args.blue_lens.as_ref(), "blue-lens")?,
            }
        }
        "few-long" => {
            let long_len = args
                .long_len
                .ok_or_else(|| CliError::Usage("pattern `few-long` requires --long-len".into()))?;
            Pattern::FewLongStripes { long_len }
        }
        other => return Err(CliError::Usage(format!("unknown pattern `{other}`"))),
    };
    let spec = GenSpec {
        n_red: args.n,
        n_blue: args.m,
        alpha: parse_price(&args.alpha)?,
        beta: parse_price(&args.beta)?,
        pattern,
        seed: args.seed,
    };
    let instance = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    std::fs::write(&args.out, instance.to_text())
        .map_err(|e| CliError::io(&format!("writing {}", args.out.display()), e))?;
    println!(
        "wrote {}: N={} stripes={} hamiltonian={}",
        args.out.display(),
        instance.len(),
        stripes(&instance).len(),
        hamiltonian_cost(&instance)
    );
    Ok(())
}
