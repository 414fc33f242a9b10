//! `priced-sort verify`: run every instance of the exhaustive small-size
//! suite through an algorithm with full instrumentation, plus the
//! certificate-cost brute force. Any violation is reported and exits 4.

use clap::Args;

use priced_sort::driver::{inversion_sort_with, FaultInjection, RunError, RunOptions};
use priced_sort::gen::enumerate_small;
use priced_sort::instrument::true_sorted;
use priced_sort::search::{certificate_cost, CertificateKind};
use priced_sort::variants::{
    multichromatic_sort, sort_both_then_merge, sort_middle_regime, MultiInstance,
};
use priced_sort::{Cost, PricedInstance};

use crate::util::{parse_price, CliError};

#[derive(Args)]
pub struct VerifyArgs {
    /// Largest instance size to enumerate exhaustively (max 12)
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Algorithm under test
    #[arg(long, default_value = "inversion_sort")]
    algo: String,
    /// Red-red price (default depends on the algorithm's regime)
    #[arg(long)]
    alpha: Option<String>,
    /// Blue-blue price (default depends on the algorithm's regime)
    #[arg(long)]
    beta: Option<String>,
    /// Seeds per instance
    #[arg(long, default_value_t = 2)]
    seeds: u64,
    /// Comma-separated check families: sorted, ledger, backbone, certificate
    #[arg(long, default_value = "sorted,ledger,backbone,certificate")]
    checks: String,
    /// Deliberately break the certificate execution to prove the checks bite
    #[arg(long, hide = true)]
    inject_fault: bool,
}

pub fn execute(args: VerifyArgs) -> Result<(), CliError> {
    if args.max_n == 0 || args.max_n > 12 {
        return Err(CliError::Usage("--max-n must be between 1 and 12".into()));
    }
    let checks: Vec<&str> = args.checks.split(',').map(str::trim).collect();
    for c in &checks {
        if !["sorted", "ledger", "backbone", "certificate"].contains(c) {
            return Err(CliError::Usage(format!("unknown check `{c}`")));
        }
    }
    let want = |c: &str| checks.contains(&c);
    if args.inject_fault && args.algo != "inversion_sort" {
        return Err(CliError::Usage("--inject-fault only applies to inversion_sort".into()));
    }

    if want("certificate") {
        certificate_brute_force()?;
        println!("certificate: cost selection matches brute force on [0,50]^2 x price grid");
    }

    let (default_alpha, default_beta) = match args.algo.as_str() {
        "inversion_sort" | "multichromatic" => ("2", "2"),
        "sort_both_then_merge" => ("0.5", "0.5"),
        "sort_middle_regime" => ("0.5", "4"),
        other => return Err(CliError::Usage(format!("unknown algorithm `{other}`"))),
    };
    let alpha = parse_price(args.alpha.as_deref().unwrap_or(default_alpha))?;
    let beta = parse_price(args.beta.as_deref().unwrap_or(default_beta))?;

    let mut runs = 0u64;
    let mut instances = 0u64;
    for n in 1..=args.max_n {
        let iter = enumerate_small(n, alpha, beta)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for instance in iter {
            instances += 1;
            for seed in 0..args.seeds {
                runs += 1;
                check_one(&args, &instance, seed, alpha, beta, &want)?;
            }
        }
    }
    println!(
        "verify: {} checks on {instances} instances x {} seeds (N <= {}): {runs} runs passed",
        checks.join(","),
        args.seeds,
        args.max_n
    );
    Ok(())
}

fn check_one(
    args: &VerifyArgs,
    instance: &PricedInstance,
    seed: u64,
    alpha: Cost,
    beta: Cost,
    want: &dyn Fn(&str) -> bool,
) -> Result<(), CliError> {
    let context = || {
        let colors: String = true_sorted(instance)
            .iter()
            .map(|id| instance.color(*id).unwrap().letter())
            .collect();
        format!("instance [{colors}] seed {seed}")
    };
    let (order, report) = match args.algo.as_str() {
        "inversion_sort" => {
            let opts = RunOptions {
                check_invariants: want("backbone"),
                fault: args.inject_fault.then_some(FaultInjection::SkipLastCertificateComparison),
                ..Default::default()
            };
            match inversion_sort_with(instance, seed, &opts) {
                Ok(run) => (run.order, run.report),
                Err(e @ RunError::Invariant { .. }) => {
                    return Err(CliError::Invariant(format!("{}: {e}", context())));
                }
                Err(e) => return Err(CliError::Invariant(format!("{}: {e}", context()))),
            }
        }
        "sort_both_then_merge" => {
            let run = sort_both_then_merge(instance, seed)
                .map_err(|e| CliError::Regime(e.to_string()))?;
            (run.order, run.report)
        }
        "sort_middle_regime" => {
            let run = sort_middle_regime(instance, seed)
                .map_err(|e| CliError::Regime(e.to_string()))?;
            (run.order, run.report)
        }
        _ => {
            // map the enumerated bichromatic instance onto two colors
            let colored: Vec<(u16, u32)> = instance
                .keys()
                .iter()
                .map(|k| {
                    let color = if k.color == priced_sort::Color::Red { 1 } else { 2 };
                    (color, priced_sort::instrument::rank_ext(instance, k.id) as u32)
                })
                .collect();
            let multi = MultiInstance::new(colored, vec![alpha, beta])
                .map_err(|e| CliError::Regime(e.to_string()))?;
            let run =
                multichromatic_sort(&multi, seed).map_err(|e| CliError::Regime(e.to_string()))?;
            let expected = multi.true_sorted();
            if want("sorted") && run.order != expected {
                return Err(CliError::Invariant(format!(
                    "{}: multichromatic output does not match the true order",
                    context()
                )));
            }
            (Vec::new(), run.report)
        }
    };
    if args.algo != "multichromatic" && want("sorted") && order != true_sorted(instance) {
        return Err(CliError::Invariant(format!(
            "{}: output does not match the true sorted order",
            context()
        )));
    }
    if want("ledger") {
        let sum = report.pivot_cost
            + report.search_cost
            + report.certificate_cost
            + report.stripe_sort_cost;
        if sum != report.total_cost {
            return Err(CliError::Invariant(format!(
                "{}: report components do not sum to the ledger total",
                context()
            )));
        }
    }
    Ok(())
}

/// Exhaustive check of the certificate-cost selection against a direct
/// evaluation of the four proof formulas.
fn certificate_brute_force() -> Result<(), CliError> {
    let grid: Vec<Cost> = ["1.5", "2", "10", "1000", "inf"]
        .iter()
        .map(|t| t.parse().unwrap())
        .collect();
    for a in 0..=50u64 {
        for b in 0..=50u64 {
            for alpha in &grid {
                for beta in &grid {
                    let choice = certificate_cost(a, b, *alpha, *beta);
                    // candidate costs in kind order; invalid kinds excluded
                    let candidates: [(CertificateKind, Option<Cost>); 4] = [
                        (
                            CertificateKind::AllPairs,
                            Some(Cost::from_int(a) .mul_count(b)),
                        ),
                        (
                            CertificateKind::MaxRedThenBlue,
                            (a >= 1).then(|| alpha.mul_count(a - 1) + Cost::from_int(b)),
                        ),
                        (
                            CertificateKind::MinBlueThenRed,
                            (b >= 1).then(|| beta.mul_count(b - 1) + Cost::from_int(a)),
                        ),
                        (
                            CertificateKind::BothExtremes,
                            (a >= 1 && b >= 1)
                                .then(|| alpha.mul_count(a - 1) + beta.mul_count(b - 1) + Cost::ONE),
                        ),
                    ];
                    let min = candidates
                        .iter()
                        .filter_map(|(_, c)| *c)
                        .min()
                        .expect("all-pairs is always a candidate");
                    let first_kind = candidates
                        .iter()
                        .find(|(_, c)| *c == Some(min))
                        .map(|(k, _)| *k)
                        .unwrap();
                    if choice.cost != min || choice.kind != first_kind {
                        return Err(CliError::Invariant(format!(
                            "certificate mismatch at A={a} B={b} alpha={alpha} beta={beta}: \
                             got ({:?}, {}), expected ({:?}, {})",
                            choice.kind, choice.cost, first_kind, min
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
