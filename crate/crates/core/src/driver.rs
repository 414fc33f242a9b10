//! End-to-end run loop: rounds of sampling, probing, certificates, and
//! backbone refinement, followed by monochromatic stripe sorting.
//!
//! A run is deterministic given `(instance, seed)`. All random draws come
//! from one seeded generator in a fixed order per round: the replenish pass
//! over active buckets (left to right), the probe pass over active
//! subproblems (left to right, two draws each), then one partner draw per
//! canonicalized inversion during the insertion pass (left to right).

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::backbone::{Backbone, BackboneError, Bucket};
use crate::cost::{competitive_ratio, Cost};
use crate::instance::{Color, KeyId, PricedInstance};
use crate::instrument::{self, GroundTruth};
use crate::oracle::{ComparisonOracle, Phase};
use crate::search::{
    certificate_cost, canonicalize_inversion, replenish_bucket, round_probe, run_certificate,
    ProbeOutcome, RawInversion,
};
use crate::sortutil::merge_sort_by;
use crate::tree::RefinementTree;

/// Deliberate defect for negative testing of the verification tooling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultInjection {
    /// Certificates drop their final comparison and may conclude unsoundly.
    SkipLastCertificateComparison,
}

/// Knobs for a run. Defaults run the plain algorithm with no ground-truth
/// instrumentation.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Record the per-round trace and unaffected-subproblem series
    /// (consults hidden ranks; reporting only).
    pub record_rounds: bool,
    /// Also record a backbone snapshot line per round.
    pub record_snapshots: bool,
    /// Check every structural invariant each round and the soundness of
    /// every completed certificate (slow; testing only).
    pub check_invariants: bool,
    /// Enable the extra cross probes against the opposite sample extremes.
    pub extra_cross_probe: bool,
    /// Inject a defect (see [`FaultInjection`]).
    pub fault: Option<FaultInjection>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("inversion sort needs both monochromatic prices above 1 (or inf); got alpha={alpha}, beta={beta} — use the cheap-price variants for this regime")]
    Regime { alpha: Cost, beta: Cost },
    #[error("round cap {cap} exceeded on an instance of {n} keys; the run appears stuck")]
    RoundCap { cap: u64, n: usize },
    #[error("instrumented invariant violated in round {round}: {detail}")]
    Invariant { round: u64, detail: String },
    #[error(transparent)]
    Internal(#[from] BackboneError),
}

/// Per-round instrumentation record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrace {
    pub round: u64,
    pub active: u32,
    pub unaffected: u32,
    pub inversions: u32,
    pub pivot_charges: u64,
}

/// Exact cost breakdown and shape statistics of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub total_cost: Cost,
    pub pivot_cost: Cost,
    pub search_cost: Cost,
    pub certificate_cost: Cost,
    pub stripe_sort_cost: Cost,
    pub hamiltonian: Cost,
    pub ratio: Cost,
    pub rounds: u64,
    pub tree_height: u32,
    /// `(active, unaffected)` per round; empty unless rounds were recorded.
    pub unaffected_series: Vec<(u32, u32)>,
}

/// Everything a finished run produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortRun {
    pub order: Vec<KeyId>,
    pub report: RunReport,
    pub tree: RefinementTree,
    /// Final comparison counts, for auditing the report against the prices.
    pub ledger: crate::oracle::CostLedger,
    pub trace: Vec<RoundTrace>,
    pub snapshots: Vec<String>,
}

/// Abort threshold: generous enough for the largest legitimate certificate
/// wait, small enough to turn a non-terminating bug into an error.
pub(crate) fn round_cap(n: usize) -> u64 {
    let n = n.max(1) as u64;
    let lg = 63 - n.leading_zeros() as u64;
    64 * n * (lg + 1).pow(3)
}

/// Sorts one monochromatic group (bucket members plus representative) with
/// charged comparisons; at most `k * ceil(log2 k)` of them.
pub fn sort_stripe(keys: &[KeyId], oracle: &mut ComparisonOracle) -> Vec<KeyId> {
    debug_assert!(
        keys.windows(2).all(|w| oracle.color(w[0]).ok() == oracle.color(w[1]).ok()),
        "stripe sort expects a single color"
    );
    merge_sort_by(keys, &mut |a, b| oracle.cmp(a, b))
}

/// Counts active subproblems and how many of them are unaffected: per
/// color, at least a quarter of the subproblem's keys lie inside the stripe
/// subinstance spanned by its two representatives.
pub fn measure_unaffected(backbone: &Backbone, instance: &PricedInstance) -> (u32, u32) {
    let gt = GroundTruth::new(instance);
    measure_unaffected_with(backbone, instance, &gt)
}

pub fn measure_unaffected_with(
    backbone: &Backbone,
    instance: &PricedInstance,
    gt: &GroundTruth,
) -> (u32, u32) {
    let mut active = 0;
    let mut unaffected = 0;
    for b in backbone.active_boundaries() {
        active += 1;
        let lower = backbone.bucket(b);
        let upper = backbone.bucket(b + 1);
        if side_unaffected(lower, upper, true, instance, gt)
            && side_unaffected(upper, lower, false, instance, gt)
        {
            unaffected += 1;
        }
    }
    (active, unaffected)
}

/// One color's check: keys of `bucket`'s color inside the stripe
/// subinstance must be at least a quarter of the subproblem's count.
fn side_unaffected(
    bucket: &Bucket,
    other: &Bucket,
    bucket_is_lower: bool,
    instance: &PricedInstance,
    gt: &GroundTruth,
) -> bool {
    let rep = bucket.rep();
    let sub_count = bucket.len() as u64 + u64::from(!rep.is_sentinel());
    let rep_rank = instrument::rank_ext(instance, rep);
    let other_rank = instrument::rank_ext(instance, other.rep());
    // The stripe of the representative extends the interval on its own side.
    let inst_count = if rep.is_sentinel() {
        let (lo, hi) =
            if bucket_is_lower { (i64::MIN, other_rank) } else { (other_rank, i64::MAX) };
        gt.count_between(bucket.color(), lo, hi) as u64
    } else {
        let (stripe_lo, stripe_hi) = gt.stripe_bounds_at(rep_rank as u32);
        let (lo, hi) = if bucket_is_lower {
            (stripe_lo as i64 - 1, other_rank)
        } else {
            (other_rank, stripe_hi as i64 + 1)
        };
        gt.count_between(bucket.color(), lo, hi) as u64
    };
    4 * inst_count >= sub_count
}

/// Runs the sorter with default options.
pub fn inversion_sort(instance: &PricedInstance, seed: u64) -> Result<SortRun, RunError> {
    inversion_sort_with(instance, seed, &RunOptions::default())
}

/// Runs the sorter. Requires the priced regime where bichromatic
/// comparisons are cheapest: both monochromatic prices above 1 (or `inf`).
pub fn inversion_sort_with(
    instance: &PricedInstance,
    seed: u64,
    opts: &RunOptions,
) -> Result<SortRun, RunError> {
    if !(instance.alpha() > Cost::ONE && instance.beta() > Cost::ONE) {
        return Err(RunError::Regime { alpha: instance.alpha(), beta: instance.beta() });
    }
    let mut oracle = ComparisonOracle::new(instance);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tree = RefinementTree::new();
    let mut backbone =
        Backbone::init(instance.ids_of(Color::Red), instance.ids_of(Color::Blue), 0);
    let gt = (opts.record_rounds || opts.check_invariants)
        .then(|| GroundTruth::new(instance));
    let skip_last = opts.fault == Some(FaultInjection::SkipLastCertificateComparison);

    let cap = round_cap(instance.len());
    let mut round: u64 = 0;
    let mut active = backbone.active_boundaries();
    let mut trace = Vec::new();
    let mut snapshots = Vec::new();

    while !active.is_empty() {
        round += 1;
        if round > cap {
            return Err(RunError::RoundCap { cap, n: instance.len() });
        }

        // Replenish pass over active buckets.
        oracle.set_phase(Phase::Search);
        let mut last_done = usize::MAX;
        for &b in &active {
            if b != last_done {
                replenish_bucket(&mut backbone, b, &mut oracle, &mut rng);
            }
            replenish_bucket(&mut backbone, b + 1, &mut oracle, &mut rng);
            last_done = b + 1;
        }

        // Probe pass.
        let mut pendings: Vec<(usize, RawInversion)> = Vec::new();
        for &b in &active {
            if let ProbeOutcome::Inversion(raw) =
                round_probe(&mut backbone, b, &mut oracle, &mut rng, opts.extra_cross_probe)
            {
                pendings.push((b, raw));
            }
        }
        let probe_found: Vec<usize> = pendings.iter().map(|(b, _)| *b).collect();

        // Certificate pass: triggered once a subproblem's age exceeds the
        // cost of its cheapest proof.
        let mut finished_any = false;
        for &b in &active {
            if probe_found.binary_search(&b).is_ok() {
                continue;
            }
            let left = backbone.bucket(b);
            let right = backbone.bucket(b + 1);
            let (red_count, blue_count) = match left.color() {
                Color::Red => (left.len() as u64, right.len() as u64),
                Color::Blue => (right.len() as u64, left.len() as u64),
            };
            let choice = certificate_cost(red_count, blue_count, oracle.alpha(), oracle.beta());
            let age = Cost::from_int(round - backbone.sub(b).mark());
            if age > choice.cost {
                oracle.set_phase(Phase::Certificate);
                match run_certificate(&mut backbone, b, &choice, &mut oracle, skip_last) {
                    ProbeOutcome::CertificateComplete => {
                        finished_any = true;
                        if opts.check_invariants {
                            check_finished_sound(&backbone, b, instance, round)?;
                        }
                    }
                    ProbeOutcome::Inversion(raw) => pendings.push((b, raw)),
                    ProbeOutcome::NoInversion => unreachable!("certificates always conclude"),
                }
                oracle.set_phase(Phase::Search);
            }
        }

        // Insertion pass, left to right along the backbone.
        pendings.sort_by_key(|(b, _)| *b);
        let inversions = pendings.len() as u32;
        let pivot_cross_before = oracle.ledger().phase_cross_count(Phase::Pivot);
        let mut split_members: HashMap<KeyId, u32> = HashMap::new();
        let mut offset = 0;
        for (b0, raw) in pendings {
            let b = b0 + offset;
            oracle.set_phase(Phase::Search);
            let (y, x) = canonicalize_inversion(&backbone, b, raw, &mut oracle, &mut rng)?;
            if opts.check_invariants {
                for m in backbone.bucket(b).members().iter().chain(backbone.bucket(b + 1).members()) {
                    if *m != x && *m != y {
                        *split_members.entry(*m).or_insert(0) += 1;
                    }
                }
            }
            let lower_color = backbone.bucket(b + 1).color();
            let children = tree.split(backbone.sub(b).node(), y, x, lower_color, round);
            oracle.set_phase(Phase::Pivot);
            backbone.insert_inversion(b, y, x, &mut oracle, round, children)?;
            offset += 2;
        }
        if inversions > 0 || finished_any {
            active = backbone.active_boundaries();
        }

        if opts.check_invariants {
            if let Some(over) = split_members.values().find(|c| **c > 2) {
                return Err(RunError::Invariant {
                    round,
                    detail: format!("a key took {over} pivot placements in one round"),
                });
            }
            let report = backbone.check_invariants(instance);
            if !report.passed() {
                return Err(RunError::Invariant { round, detail: report.violations.join("; ") });
            }
            let frontier = tree.frontier_in_order();
            let sub_nodes: Vec<u32> =
                (0..backbone.n_boundaries()).map(|i| backbone.sub(i).node()).collect();
            if frontier != sub_nodes {
                return Err(RunError::Invariant {
                    round,
                    detail: "backbone does not match the tree frontier".into(),
                });
            }
        }
        if opts.record_rounds {
            let (a, u) = measure_unaffected_with(&backbone, instance, gt.as_ref().unwrap());
            let pivot_charges =
                oracle.ledger().phase_cross_count(Phase::Pivot) - pivot_cross_before;
            trace.push(RoundTrace { round, active: a, unaffected: u, inversions, pivot_charges });
        }
        if opts.record_snapshots {
            snapshots.push(backbone.export_snapshot());
        }
    }

    // All subproblems certified: buckets are stripes. Sort and splice.
    oracle.set_phase(Phase::StripeSort);
    let mut order = Vec::with_capacity(instance.len());
    for pos in 0..backbone.len() {
        let bucket = backbone.bucket(pos);
        let mut group = bucket.members().to_vec();
        if !bucket.rep().is_sentinel() {
            group.push(bucket.rep());
        }
        order.extend(sort_stripe(&group, &mut oracle));
    }

    let ledger = oracle.ledger();
    let total_cost = ledger.total_cost();
    let hamiltonian = instrument::hamiltonian_cost(instance);
    let report = RunReport {
        total_cost,
        pivot_cost: ledger.phase_cost(Phase::Pivot),
        search_cost: ledger.phase_cost(Phase::Search),
        certificate_cost: ledger.phase_cost(Phase::Certificate),
        stripe_sort_cost: ledger.phase_cost(Phase::StripeSort),
        hamiltonian,
        ratio: competitive_ratio(total_cost, hamiltonian),
        rounds: round,
        tree_height: tree.height(),
        unaffected_series: trace.iter().map(|t| (t.active, t.unaffected)).collect(),
    };
    Ok(SortRun { order, report, tree, ledger: ledger.clone(), trace, snapshots })
}

fn check_finished_sound(
    backbone: &Backbone,
    boundary: usize,
    instance: &PricedInstance,
    round: u64,
) -> Result<(), RunError> {
    let left = backbone.bucket(boundary);
    let right = backbone.bucket(boundary + 1);
    let left_max = left.members().iter().max_by_key(|m| instrument::rank_ext(instance, **m));
    let right_min = right.members().iter().min_by_key(|m| instrument::rank_ext(instance, **m));
    if let (Some(&xm), Some(&ym)) = (left_max, right_min) {
        if instrument::rank_ext(instance, xm) > instrument::rank_ext(instance, ym) {
            return Err(RunError::Invariant {
                round,
                detail: format!(
                    "no-inversion certificate between representatives {} and {} is unsound: members {} and {} are inverted",
                    left.rep(),
                    right.rep(),
                    ym,
                    xm,
                ),
            });
        }
    }
    Ok(())
}
