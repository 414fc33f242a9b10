//! Direct algorithms for the regimes where monochromatic comparisons are
//! cheap: sort-then-merge when both colors are cheap, sort-then-binary-
//! search when only one is.

use thiserror::Error;

use crate::cost::{competitive_ratio, Cost};
use crate::driver::RunReport;
use crate::instance::{Color, KeyId, PricedInstance};
use crate::instrument;
use crate::oracle::{ComparisonOracle, Outcome, Phase};
use crate::sortutil::{binary_search_position, gallop, merge_sort_by};

#[derive(Debug, Error)]
pub enum VariantError {
    #[error("wrong price regime for this algorithm: got alpha={alpha}, beta={beta}, need {need}")]
    Regime { alpha: Cost, beta: Cost, need: &'static str },
}

/// Output of a variant run: the sorted order, the standard cost report, and
/// the lengths of the runs emitted by the galloping merge (empty for the
/// middle regime).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantRun {
    pub order: Vec<KeyId>,
    pub report: RunReport,
    pub merge_runs: Vec<usize>,
}

fn report_from(oracle: &ComparisonOracle, instance: &PricedInstance) -> RunReport {
    let ledger = oracle.ledger();
    let total_cost = ledger.total_cost();
    let hamiltonian = instrument::hamiltonian_cost(instance);
    RunReport {
        total_cost,
        pivot_cost: ledger.phase_cost(Phase::Pivot),
        search_cost: ledger.phase_cost(Phase::Search),
        certificate_cost: ledger.phase_cost(Phase::Certificate),
        stripe_sort_cost: ledger.phase_cost(Phase::StripeSort),
        hamiltonian,
        ratio: competitive_ratio(total_cost, hamiltonian),
        rounds: 0,
        tree_height: 0,
        unaffected_series: Vec::new(),
    }
}

/// Both monochromatic prices below 1: sort each color separately, then merge
/// the two sorted lists with doubling (galloping) bichromatic searches.
pub fn sort_both_then_merge(
    instance: &PricedInstance,
    seed: u64,
) -> Result<VariantRun, VariantError> {
    let _ = seed; // deterministic algorithm; seed kept for interface parity
    if !(instance.alpha() < Cost::ONE && instance.beta() < Cost::ONE) {
        return Err(VariantError::Regime {
            alpha: instance.alpha(),
            beta: instance.beta(),
            need: "alpha < 1 and beta < 1",
        });
    }
    let mut oracle = ComparisonOracle::new(instance);
    oracle.set_phase(Phase::StripeSort);
    let reds = merge_sort_by(&instance.ids_of(Color::Red), &mut |a, b| oracle.cmp(a, b));
    let blues = merge_sort_by(&instance.ids_of(Color::Blue), &mut |a, b| oracle.cmp(a, b));

    oracle.set_phase(Phase::Search);
    let mut order = Vec::with_capacity(instance.len());
    let mut merge_runs = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < reds.len() && j < blues.len() {
        // longest red prefix below the current blue head
        let take = gallop(reds.len(), i, |k| oracle.cmp(reds[k], blues[j]) == Outcome::Less);
        order.extend_from_slice(&reds[i..i + take]);
        merge_runs.push(take);
        i += take;
        if i == reds.len() {
            break;
        }
        // now reds[i] > blues[j]; the blue run is nonempty
        let take = gallop(blues.len(), j, |k| oracle.cmp(blues[k], reds[i]) == Outcome::Less);
        order.extend_from_slice(&blues[j..j + take]);
        merge_runs.push(take);
        j += take;
    }
    order.extend_from_slice(&reds[i..]);
    order.extend_from_slice(&blues[j..]);
    Ok(VariantRun { order, report: report_from(&oracle, instance), merge_runs })
}

/// One monochromatic price below 1, the other above: sort the cheap color,
/// binary-search every expensive key into it, then sort each expensive
/// stripe on its own.
pub fn sort_middle_regime(
    instance: &PricedInstance,
    seed: u64,
) -> Result<VariantRun, VariantError> {
    let _ = seed;
    let (alpha, beta) = (instance.alpha(), instance.beta());
    let cheap = if alpha < Cost::ONE && beta > Cost::ONE {
        Color::Red
    } else if beta < Cost::ONE && alpha > Cost::ONE {
        Color::Blue
    } else {
        return Err(VariantError::Regime {
            alpha,
            beta,
            need: "alpha < 1 < beta or beta < 1 < alpha",
        });
    };
    let mut oracle = ComparisonOracle::new(instance);
    oracle.set_phase(Phase::StripeSort);
    let base = merge_sort_by(&instance.ids_of(cheap), &mut |a, b| oracle.cmp(a, b));

    // place each expensive key into its gap between consecutive cheap keys
    oracle.set_phase(Phase::Search);
    let mut gaps: Vec<Vec<KeyId>> = vec![Vec::new(); base.len() + 1];
    for key in instance.ids_of(cheap.opposite()) {
        let pos = binary_search_position(&base, key, &mut |a, b| oracle.cmp(a, b));
        gaps[pos].push(key);
    }

    oracle.set_phase(Phase::StripeSort);
    let mut order = Vec::with_capacity(instance.len());
    for (pos, gap) in gaps.into_iter().enumerate() {
        order.extend(merge_sort_by(&gap, &mut |a, b| oracle.cmp(a, b)));
        if pos < base.len() {
            order.push(base[pos]);
        }
    }
    Ok(VariantRun { order, report: report_from(&oracle, instance), merge_runs: Vec::new() })
}
