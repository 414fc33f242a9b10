//! Multichromatic sorting: `k` colors, bichromatic comparisons at cost 1,
//! monochromatic comparisons at per-color prices above 1.
//!
//! The run has three phases: seed the backbone with one sorted pick per
//! color, insert the remaining keys by backbone binary search (pivoting the
//! neighboring buckets whenever a key joins the backbone), then drive the
//! same inversion round loop as the bichromatic sorter over all adjacent
//! bucket pairs at once, and finally sort the monochromatic stripes.

use std::collections::VecDeque;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::cost::{competitive_ratio, Cost, Rat};
use crate::driver::{round_cap, RunReport};
use crate::instance::KeyId;
use crate::oracle::{Outcome, Phase, PHASES};
use crate::sortutil::{merge_sort_by, tournament_extreme};

/// 1-based color index.
pub type MultiColor = u16;

#[derive(Debug, Error)]
pub enum MultiError {
    #[error("multichromatic instances need at least 2 colors, got {0}")]
    TooFewColors(usize),
    #[error("monochromatic price for color {0} must exceed 1 (or be inf)")]
    BadGamma(MultiColor),
    #[error("color {0} out of range")]
    BadColor(MultiColor),
    #[error("rank {0} out of range or duplicated")]
    BadRank(u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance must contain at least one key")]
    Empty,
    #[error("color {color} has an infinite price but a stripe of {len} keys; its order cannot be fully resolved")]
    InfinitePriceStripe { color: MultiColor, len: usize },
    #[error("round cap {cap} exceeded on an instance of {n} keys; the run appears stuck")]
    RoundCap { cap: u64, n: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Keys colored `1..=k` with hidden ranks and per-color prices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiInstance {
    colors: Vec<MultiColor>,
    ranks: Vec<u32>,
    gammas: Vec<Cost>,
}

impl MultiInstance {
    pub fn new(
        colored_ranks: Vec<(MultiColor, u32)>,
        gammas: Vec<Cost>,
    ) -> Result<MultiInstance, MultiError> {
        if gammas.len() < 2 {
            return Err(MultiError::TooFewColors(gammas.len()));
        }
        for (i, g) in gammas.iter().enumerate() {
            if *g <= Cost::ONE {
                return Err(MultiError::BadGamma(i as MultiColor + 1));
            }
        }
        let n = colored_ranks.len();
        if n == 0 {
            return Err(MultiError::Empty);
        }
        let mut seen = vec![false; n];
        let mut colors = Vec::with_capacity(n);
        let mut ranks = Vec::with_capacity(n);
        for (color, rank) in colored_ranks {
            if color == 0 || color as usize > gammas.len() {
                return Err(MultiError::BadColor(color));
            }
            if rank as usize >= n || seen[rank as usize] {
                return Err(MultiError::BadRank(rank));
            }
            seen[rank as usize] = true;
            colors.push(color);
            ranks.push(rank);
        }
        Ok(MultiInstance { colors, ranks, gammas })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn k(&self) -> usize {
        self.gammas.len()
    }

    pub fn gamma(&self, color: MultiColor) -> Cost {
        self.gammas[color as usize - 1]
    }

    pub fn color(&self, id: KeyId) -> MultiColor {
        self.colors[id.0 as usize]
    }

    /// Keys ordered by hidden rank (instrumentation).
    pub fn true_sorted(&self) -> Vec<KeyId> {
        let mut by_rank = vec![KeyId(0); self.len()];
        for (id, &rank) in self.ranks.iter().enumerate() {
            by_rank[rank as usize] = KeyId(id as u32);
        }
        by_rank
    }

    /// Adjacency-price sum over the true sorted order (instrumentation).
    pub fn hamiltonian_cost(&self) -> Cost {
        let sorted = self.true_sorted();
        let mut total = Cost::ZERO;
        for pair in sorted.windows(2) {
            let (a, b) = (self.color(pair[0]), self.color(pair[1]));
            total += if a == b { self.gamma(a) } else { Cost::ONE };
        }
        total
    }

    /// `N k gamma_1 .. gamma_k` then `color rank` per key, in id order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}", self.len(), self.k());
        for g in &self.gammas {
            out.push(' ');
            out.push_str(&g.display_decimal());
        }
        out.push('\n');
        for (c, r) in self.colors.iter().zip(&self.ranks) {
            out.push_str(&format!("{c} {r}\n"));
        }
        out
    }
}

impl FromStr for MultiInstance {
    type Err = MultiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (lno, header) = lines.next().ok_or(MultiError::Empty)?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() < 4 {
            return Err(MultiError::Parse {
                line: lno + 1,
                msg: "expected `N k gamma_1 .. gamma_k` with k >= 2".into(),
            });
        }
        let n: usize = parts[0]
            .parse()
            .map_err(|_| MultiError::Parse { line: lno + 1, msg: "bad key count".into() })?;
        let k: usize = parts[1]
            .parse()
            .map_err(|_| MultiError::Parse { line: lno + 1, msg: "bad color count".into() })?;
        if parts.len() != 2 + k {
            return Err(MultiError::Parse {
                line: lno + 1,
                msg: format!("expected {k} prices, got {}", parts.len() - 2),
            });
        }
        let gammas: Vec<Cost> = parts[2..]
            .iter()
            .map(|t| t.parse::<Cost>())
            .collect::<Result<_, _>>()
            .map_err(|e| MultiError::Parse { line: lno + 1, msg: e.to_string() })?;
        let mut colored_ranks = Vec::with_capacity(n);
        for _ in 0..n {
            let (lno, line) = lines
                .next()
                .ok_or(MultiError::Parse { line: 0, msg: format!("expected {n} key lines") })?;
            let mut it = line.split_whitespace();
            let color: MultiColor = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or(MultiError::Parse { line: lno + 1, msg: "bad color".into() })?;
            let rank: u32 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or(MultiError::Parse { line: lno + 1, msg: "bad rank".into() })?;
            colored_ranks.push((color, rank));
        }
        MultiInstance::new(colored_ranks, gammas)
    }
}

/// Deterministically generates a multichromatic instance: colors assigned
/// uniformly at random along the rank order, ids shuffled.
pub fn random_multi_instance(
    n: usize,
    gammas: Vec<Cost>,
    seed: u64,
) -> Result<MultiInstance, MultiError> {
    let k = gammas.len() as MultiColor;
    if k < 2 {
        return Err(MultiError::TooFewColors(gammas.len()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let colors_by_rank: Vec<MultiColor> =
        (0..n).map(|_| rng.random_range(1..=k)).collect();
    let mut ranks: Vec<u32> = (0..n as u32).collect();
    ranks.shuffle(&mut rng);
    let colored_ranks: Vec<(MultiColor, u32)> =
        ranks.into_iter().map(|r| (colors_by_rank[r as usize], r)).collect();
    MultiInstance::new(colored_ranks, gammas)
}

/// Exact per-color monochromatic counts plus the bichromatic count, split
/// by accounting phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLedger {
    mono: Vec<[u64; 4]>,
    cross: [u64; 4],
    gammas: Vec<Cost>,
}

impl MultiLedger {
    fn new(gammas: Vec<Cost>) -> MultiLedger {
        MultiLedger { mono: vec![[0; 4]; gammas.len()], cross: [0; 4], gammas }
    }

    pub fn count_mono(&self, color: MultiColor) -> u64 {
        self.mono[color as usize - 1].iter().sum()
    }

    pub fn count_cross(&self) -> u64 {
        self.cross.iter().sum()
    }

    pub fn total_cost(&self) -> Cost {
        let mut total = Cost::from_int(self.count_cross());
        for (i, g) in self.gammas.iter().enumerate() {
            total += g.mul_count(self.mono[i].iter().sum());
        }
        total
    }

    pub fn phase_cost(&self, phase: Phase) -> Cost {
        let idx = PHASES.iter().position(|p| *p == phase).unwrap();
        let mut total = Cost::from_int(self.cross[idx]);
        for (i, g) in self.gammas.iter().enumerate() {
            total += g.mul_count(self.mono[i][idx]);
        }
        total
    }
}

/// Charging oracle over a multichromatic instance.
pub struct MultiOracle {
    colors: Vec<MultiColor>,
    ranks: Vec<u32>,
    ledger: MultiLedger,
    phase: Phase,
}

impl MultiOracle {
    pub fn new(instance: &MultiInstance) -> MultiOracle {
        MultiOracle {
            colors: instance.colors.clone(),
            ranks: instance.ranks.clone(),
            ledger: MultiLedger::new(instance.gammas.clone()),
            phase: Phase::Search,
        }
    }

    pub fn ledger(&self) -> &MultiLedger {
        &self.ledger
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn color(&self, id: KeyId) -> MultiColor {
        self.colors[id.0 as usize]
    }

    pub fn gamma(&self, color: MultiColor) -> Cost {
        self.ledger.gammas[color as usize - 1]
    }

    /// Charged comparison; `Less` iff `a` precedes `b`.
    pub fn cmp(&mut self, a: KeyId, b: KeyId) -> Outcome {
        assert_ne!(a, b, "cannot compare a key with itself");
        let phase = PHASES.iter().position(|p| *p == self.phase).unwrap();
        let (ca, cb) = (self.color(a), self.color(b));
        if ca == cb {
            self.ledger.mono[ca as usize - 1][phase] += 1;
        } else {
            self.ledger.cross[phase] += 1;
        }
        if self.ranks[a.0 as usize] < self.ranks[b.0 as usize] {
            Outcome::Less
        } else {
            Outcome::Greater
        }
    }
}

/// A backbone bucket: one representative and the same-colored keys known to
/// lie between its two neighbors.
#[derive(Debug, Clone)]
struct MBucket {
    rep: KeyId,
    color: MultiColor,
    members: Vec<KeyId>,
    sampled_len: usize,
    sample_max: KeyId,
    sample_min: KeyId,
    credit: Rat,
}

impl MBucket {
    fn new(rep: KeyId, color: MultiColor) -> MBucket {
        MBucket {
            rep,
            color,
            members: Vec::new(),
            sampled_len: 0,
            sample_max: rep,
            sample_min: rep,
            credit: Rat::from_integer(0),
        }
    }

    fn reset_sample(&mut self) {
        self.sampled_len = 0;
        self.sample_max = self.rep;
        self.sample_min = self.rep;
        self.credit = Rat::from_integer(0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MSubState {
    Active,
    Finished,
}

#[derive(Debug, Clone)]
struct MSub {
    state: MSubState,
    mark: u64,
}

/// Result of a multichromatic run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiRun {
    pub order: Vec<KeyId>,
    pub report: RunReport,
}

/// The four proof shapes generalized to per-side prices.
fn cheapest_certificate(a: u64, ga: Cost, b: u64, gb: Cost) -> (u8, Cost) {
    let mut best = (0u8, Cost::Finite(Rat::from_integer(a as i128 * b as i128)));
    let mut consider = |kind: u8, cost: Cost| {
        if cost < best.1 {
            best = (kind, cost);
        }
    };
    if a >= 1 {
        consider(1, ga.mul_count(a - 1) + Cost::from_int(b));
    }
    if b >= 1 {
        consider(2, gb.mul_count(b - 1) + Cost::from_int(a));
    }
    if a >= 1 && b >= 1 {
        consider(3, ga.mul_count(a - 1) + gb.mul_count(b - 1) + Cost::ONE);
    }
    best
}

struct MultiState {
    buckets: Vec<MBucket>,
    subs: Vec<MSub>,
}

impl MultiState {
    fn active_boundaries(&self) -> Vec<usize> {
        self.subs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.state == MSubState::Active)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Sorts a multichromatic instance. Needs at least two declared colors; an
/// instance whose keys all share one color reduces to a monochromatic merge
/// sort. Colors with infinite prices are fine as long as each of their
/// stripes is a single key.
pub fn multichromatic_sort(instance: &MultiInstance, seed: u64) -> Result<MultiRun, MultiError> {
    let mut oracle = MultiOracle::new(instance);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = instance.len();

    let mut by_color: Vec<Vec<KeyId>> = vec![Vec::new(); instance.k()];
    for id in 0..n as u32 {
        by_color[instance.color(KeyId(id)) as usize - 1].push(KeyId(id));
    }
    let present: Vec<usize> = (0..instance.k()).filter(|c| !by_color[*c].is_empty()).collect();

    // One color present: nothing bichromatic to do.
    if present.len() <= 1 {
        let all: Vec<KeyId> = (0..n as u32).map(KeyId).collect();
        let color = instance.color(all[0]);
        if instance.gamma(color).is_infinite() && n > 1 {
            return Err(MultiError::InfinitePriceStripe { color, len: n });
        }
        oracle.set_phase(Phase::StripeSort);
        let order = merge_sort_by(&all, &mut |a, b| oracle.cmp(a, b));
        return Ok(finish(order, &oracle, instance, 0));
    }

    // Seed the backbone: one uniform pick per color, sorted bichromatically.
    let picks: Vec<KeyId> = present
        .iter()
        .map(|&c| by_color[c][rng.random_range(0..by_color[c].len())])
        .collect();
    oracle.set_phase(Phase::Search);
    let sorted_picks = merge_sort_by(&picks, &mut |a, b| oracle.cmp(a, b));
    let mut state = MultiState {
        buckets: sorted_picks
            .iter()
            .map(|&p| MBucket::new(p, instance.color(p)))
            .collect(),
        subs: Vec::new(),
    };

    // Insert the remaining keys in random order; keys that land on the
    // backbone pivot their two neighboring buckets, and displaced members
    // re-enter the queue.
    let mut rest: Vec<KeyId> = (0..n as u32)
        .map(KeyId)
        .filter(|id| !sorted_picks.contains(id))
        .collect();
    rest.shuffle(&mut rng);
    let mut queue: VecDeque<KeyId> = rest.into();
    while let Some(e) = queue.pop_front() {
        insert_key(&mut state, e, &mut oracle, &mut queue);
    }

    // All neighboring bucket pairs become subproblems of one global loop.
    state.subs = (0..state.buckets.len().saturating_sub(1))
        .map(|_| MSub { state: MSubState::Active, mark: 0 })
        .collect();
    for b in 0..state.subs.len() {
        if state.buckets[b].members.is_empty() || state.buckets[b + 1].members.is_empty() {
            state.subs[b].state = MSubState::Finished;
        }
    }

    let cap = round_cap(n);
    let mut round: u64 = 0;
    let mut active = state.active_boundaries();
    while !active.is_empty() {
        round += 1;
        if round > cap {
            return Err(MultiError::RoundCap { cap, n });
        }
        oracle.set_phase(Phase::Search);
        // replenish
        let mut last_done = usize::MAX;
        for &b in &active {
            if b != last_done {
                replenish(&mut state.buckets[b], &mut oracle, &mut rng);
            }
            replenish(&mut state.buckets[b + 1], &mut oracle, &mut rng);
            last_done = b + 1;
        }
        // probe
        let mut pendings: Vec<(usize, KeyId, KeyId, MRedraw)> = Vec::new();
        for &b in &active {
            if let Some(found) = probe(&state, b, &mut oracle, &mut rng) {
                pendings.push((b, found.0, found.1, found.2));
            }
        }
        let probe_found: Vec<usize> = pendings.iter().map(|p| p.0).collect();
        // certificates
        let mut finished_any = false;
        for &b in &active {
            if probe_found.binary_search(&b).is_ok() {
                continue;
            }
            let (left, right) = (&state.buckets[b], &state.buckets[b + 1]);
            let (kind, cost) = cheapest_certificate(
                left.members.len() as u64,
                oracle.gamma(left.color),
                right.members.len() as u64,
                oracle.gamma(right.color),
            );
            if Cost::from_int(round - state.subs[b].mark) > cost {
                oracle.set_phase(Phase::Certificate);
                match certify(&state, b, kind, &mut oracle) {
                    None => {
                        state.subs[b].state = MSubState::Finished;
                        finished_any = true;
                    }
                    Some(found) => pendings.push((b, found.0, found.1, found.2)),
                }
                oracle.set_phase(Phase::Search);
            }
        }
        // insert, left to right
        pendings.sort_by_key(|p| p.0);
        let had_inversions = !pendings.is_empty();
        let mut offset = 0;
        for (b0, y, x, redraw) in pendings {
            let b = b0 + offset;
            oracle.set_phase(Phase::Search);
            let (y, x) = canonicalize(&state, b, y, x, redraw, &mut oracle, &mut rng)?;
            oracle.set_phase(Phase::Pivot);
            split_boundary(&mut state, b, y, x, &mut oracle, round)?;
            offset += 2;
        }
        if had_inversions || finished_any {
            active = state.active_boundaries();
        }
    }

    // Buckets are now stripes; sort each one monochromatically.
    oracle.set_phase(Phase::StripeSort);
    let mut order = Vec::with_capacity(n);
    for bucket in &state.buckets {
        let mut group = bucket.members.clone();
        group.push(bucket.rep);
        if group.len() > 1 && instance.gamma(bucket.color).is_infinite() {
            return Err(MultiError::InfinitePriceStripe {
                color: bucket.color,
                len: group.len(),
            });
        }
        order.extend(merge_sort_by(&group, &mut |a, b| oracle.cmp(a, b)));
    }
    Ok(finish(order, &oracle, instance, round))
}

fn finish(order: Vec<KeyId>, oracle: &MultiOracle, instance: &MultiInstance, rounds: u64) -> MultiRun {
    let ledger = oracle.ledger();
    let total_cost = ledger.total_cost();
    let hamiltonian = instance.hamiltonian_cost();
    MultiRun {
        order,
        report: RunReport {
            total_cost,
            pivot_cost: ledger.phase_cost(Phase::Pivot),
            search_cost: ledger.phase_cost(Phase::Search),
            certificate_cost: ledger.phase_cost(Phase::Certificate),
            stripe_sort_cost: ledger.phase_cost(Phase::StripeSort),
            hamiltonian,
            ratio: competitive_ratio(total_cost, hamiltonian),
            rounds,
            tree_height: 0,
            unaffected_series: Vec::new(),
        },
    }
}

/// Binary search over the backbone, comparing only against reps of other
/// colors; a same-colored rep is skipped through a neighbor, and a key that
/// narrows down next to a same-colored rep joins its bucket.
fn insert_key(
    state: &mut MultiState,
    e: KeyId,
    oracle: &mut MultiOracle,
    queue: &mut VecDeque<KeyId>,
) {
    oracle.set_phase(Phase::Search);
    let color = oracle.color(e);
    let mut lo = 0usize;
    let mut hi = state.buckets.len();
    let join: Option<usize> = loop {
        if lo == hi {
            break None;
        }
        let mid = (lo + hi) / 2;
        if state.buckets[mid].color != color {
            if oracle.cmp(e, state.buckets[mid].rep) == Outcome::Less {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        } else if mid + 1 < hi {
            // adjacent reps have distinct colors
            if oracle.cmp(e, state.buckets[mid + 1].rep) == Outcome::Less {
                hi = mid + 1;
            } else {
                lo = mid + 2;
            }
        } else if mid > lo {
            if oracle.cmp(e, state.buckets[mid - 1].rep) == Outcome::Less {
                hi = mid - 1;
            } else {
                // e sits somewhere around the same-colored rep: join it
                break Some(mid);
            }
        } else {
            break Some(mid);
        }
    };
    match join {
        Some(pos) => state.buckets[pos].members.push(e),
        None => {
            // e belongs between reps lo-1 and lo
            if lo > 0 && state.buckets[lo - 1].color == color {
                state.buckets[lo - 1].members.push(e);
            } else if lo < state.buckets.len() && state.buckets[lo].color == color {
                state.buckets[lo].members.push(e);
            } else {
                // new backbone element: pivot the neighboring buckets
                oracle.set_phase(Phase::Pivot);
                if lo > 0 {
                    let displaced = partition_out(&mut state.buckets[lo - 1], e, oracle, true);
                    queue.extend(displaced);
                }
                if lo < state.buckets.len() {
                    let displaced = partition_out(&mut state.buckets[lo], e, oracle, false);
                    queue.extend(displaced);
                }
                state.buckets.insert(lo, MBucket::new(e, color));
            }
        }
    }
}

/// Removes (and returns) the members on the far side of the new rep `e`:
/// those above it when `above` is true, below otherwise.
fn partition_out(
    bucket: &mut MBucket,
    e: KeyId,
    oracle: &mut MultiOracle,
    above: bool,
) -> Vec<KeyId> {
    let mut kept = Vec::new();
    let mut displaced = Vec::new();
    for m in std::mem::take(&mut bucket.members) {
        let is_less = oracle.cmp(m, e) == Outcome::Less;
        if is_less == above {
            kept.push(m);
        } else {
            displaced.push(m);
        }
    }
    bucket.members = kept;
    displaced
}

fn replenish(bucket: &mut MBucket, oracle: &mut MultiOracle, rng: &mut impl Rng) {
    bucket.credit += Rat::from_integer(1);
    let Cost::Finite(price) = oracle.gamma(bucket.color) else {
        return;
    };
    while bucket.credit >= price && bucket.sampled_len < bucket.members.len() {
        bucket.credit -= price;
        let idx = rng.random_range(bucket.sampled_len..bucket.members.len());
        bucket.members.swap(bucket.sampled_len, idx);
        let new = bucket.members[bucket.sampled_len];
        bucket.sampled_len += 1;
        if bucket.sample_max == bucket.sample_min {
            if oracle.cmp(new, bucket.sample_max) == Outcome::Greater {
                bucket.sample_max = new;
            } else {
                bucket.sample_min = new;
            }
        } else if oracle.cmp(new, bucket.sample_max) == Outcome::Greater {
            bucket.sample_max = new;
        } else if oracle.cmp(new, bucket.sample_min) == Outcome::Less {
            bucket.sample_min = new;
        }
    }
}

/// How the partner of a found inversion gets redrawn.
enum MRedraw {
    None,
    KnownPoolLeft(Vec<KeyId>),
    KnownPoolRight(Vec<KeyId>),
    PartitionKeepLeft,
    PartitionKeepRight,
}

/// The four probe tests; returns a raw `(y, x)` inversion, `y < x`.
fn probe(
    state: &MultiState,
    b: usize,
    oracle: &mut MultiOracle,
    rng: &mut impl Rng,
) -> Option<(KeyId, KeyId, MRedraw)> {
    let left = &state.buckets[b];
    let right = &state.buckets[b + 1];
    if left.members.is_empty() || right.members.is_empty() {
        return None;
    }
    let x_s = left.members[rng.random_range(0..left.members.len())];
    let x_q = right.members[rng.random_range(0..right.members.len())];
    if oracle.cmp(x_s, x_q) == Outcome::Greater {
        return Some((x_q, x_s, MRedraw::None));
    }
    if oracle.cmp(x_s, right.sample_min) == Outcome::Greater {
        return Some((right.sample_min, x_s, MRedraw::PartitionKeepLeft));
    }
    if oracle.cmp(left.sample_max, x_q) == Outcome::Greater {
        return Some((x_q, left.sample_max, MRedraw::PartitionKeepRight));
    }
    if oracle.cmp(left.sample_max, right.sample_min) == Outcome::Greater {
        return Some((right.sample_min, left.sample_max, MRedraw::PartitionKeepRight));
    }
    None
}

/// Executes the chosen proof; `None` means the order was confirmed.
fn certify(
    state: &MultiState,
    b: usize,
    kind: u8,
    oracle: &mut MultiOracle,
) -> Option<(KeyId, KeyId, MRedraw)> {
    let left = &state.buckets[b];
    let right = &state.buckets[b + 1];
    match kind {
        0 => {
            // all pairs
            let bw = right.members.len();
            let mut inverted = vec![false; left.members.len() * bw];
            for (i, &x) in left.members.iter().enumerate() {
                for (j, &y) in right.members.iter().enumerate() {
                    inverted[i * bw + j] = oracle.cmp(y, x) == Outcome::Less;
                }
            }
            let (i0, j0) = (0..left.members.len())
                .flat_map(|i| (0..bw).map(move |j| (i, j)))
                .find(|(i, j)| inverted[i * bw + j])?;
            let pool: Vec<KeyId> = left
                .members
                .iter()
                .enumerate()
                .filter(|(i, _)| inverted[i * bw + j0])
                .map(|(_, &x)| x)
                .collect();
            Some((right.members[j0], left.members[i0], MRedraw::KnownPoolRight(pool)))
        }
        1 => {
            // left tournament to the maximum, then cross comparisons
            let extreme =
                tournament_extreme(&left.members, true, &mut |a, b| oracle.cmp(a, b)).unwrap();
            let pool: Vec<KeyId> = right
                .members
                .iter()
                .copied()
                .filter(|&y| oracle.cmp(y, extreme) == Outcome::Less)
                .collect();
            let y0 = *pool.first()?;
            Some((y0, extreme, MRedraw::KnownPoolLeft(pool)))
        }
        2 => {
            // right tournament to the minimum, then cross comparisons
            let extreme =
                tournament_extreme(&right.members, false, &mut |a, b| oracle.cmp(a, b)).unwrap();
            let pool: Vec<KeyId> = left
                .members
                .iter()
                .copied()
                .filter(|&x| oracle.cmp(x, extreme) == Outcome::Greater)
                .collect();
            let x0 = *pool.first()?;
            Some((extreme, x0, MRedraw::KnownPoolRight(pool)))
        }
        _ => {
            // both tournaments plus one cross comparison
            let max_left =
                tournament_extreme(&left.members, true, &mut |a, b| oracle.cmp(a, b)).unwrap();
            let min_right =
                tournament_extreme(&right.members, false, &mut |a, b| oracle.cmp(a, b)).unwrap();
            if oracle.cmp(min_right, max_left) == Outcome::Less {
                Some((min_right, max_left, MRedraw::PartitionKeepRight))
            } else {
                None
            }
        }
    }
}

fn canonicalize(
    state: &MultiState,
    b: usize,
    y: KeyId,
    x: KeyId,
    redraw: MRedraw,
    oracle: &mut MultiOracle,
    rng: &mut impl Rng,
) -> Result<(KeyId, KeyId), MultiError> {
    let draw = |pool: Vec<KeyId>, rng: &mut dyn rand::RngCore| -> Result<KeyId, MultiError> {
        if pool.is_empty() {
            return Err(MultiError::Internal("empty canonicalization pool".into()));
        }
        Ok(pool[rng.random_range(0..pool.len())])
    };
    match redraw {
        MRedraw::None => Ok((y, x)),
        MRedraw::KnownPoolLeft(pool) => Ok((draw(pool, rng)?, x)),
        MRedraw::KnownPoolRight(pool) => Ok((y, draw(pool, rng)?)),
        MRedraw::PartitionKeepLeft => {
            let pool: Vec<KeyId> = state.buckets[b + 1]
                .members
                .iter()
                .copied()
                .filter(|&m| oracle.cmp(m, x) == Outcome::Less)
                .collect();
            Ok((draw(pool, rng)?, x))
        }
        MRedraw::PartitionKeepRight => {
            let pool: Vec<KeyId> = state.buckets[b]
                .members
                .iter()
                .copied()
                .filter(|&m| oracle.cmp(m, y) == Outcome::Greater)
                .collect();
            Ok((y, draw(pool, rng)?))
        }
    }
}

/// Inserts the inversion `u_b < y < x < u_{b+1}` on the backbone, splitting
/// the two buckets with one cross comparison per member.
fn split_boundary(
    state: &mut MultiState,
    b: usize,
    y: KeyId,
    x: KeyId,
    oracle: &mut MultiOracle,
    round: u64,
) -> Result<(), MultiError> {
    let x_idx = state.buckets[b].members.iter().position(|&k| k == x);
    let y_idx = state.buckets[b + 1].members.iter().position(|&k| k == y);
    let (Some(x_idx), Some(y_idx)) = (x_idx, y_idx) else {
        return Err(MultiError::Internal(format!(
            "inversion endpoints not members at boundary {b}"
        )));
    };
    state.buckets[b].members.swap_remove(x_idx);
    state.buckets[b + 1].members.swap_remove(y_idx);
    let mut x_bucket = MBucket::new(x, oracle.color(x));
    let mut y_bucket = MBucket::new(y, oracle.color(y));
    let mut keep_left = Vec::new();
    for m in std::mem::take(&mut state.buckets[b].members) {
        if oracle.cmp(m, y) == Outcome::Less {
            keep_left.push(m);
        } else {
            x_bucket.members.push(m);
        }
    }
    let mut keep_right = Vec::new();
    for m in std::mem::take(&mut state.buckets[b + 1].members) {
        if oracle.cmp(m, x) == Outcome::Less {
            y_bucket.members.push(m);
        } else {
            keep_right.push(m);
        }
    }
    state.buckets[b].members = keep_left;
    state.buckets[b].reset_sample();
    state.buckets[b + 1].members = keep_right;
    state.buckets[b + 1].reset_sample();
    state.buckets.splice(b + 1..b + 1, [y_bucket, x_bucket]);
    let mut new_subs =
        [MSub { state: MSubState::Active, mark: round }, MSub { state: MSubState::Active, mark: round }, MSub { state: MSubState::Active, mark: round }];
    for (i, sub) in new_subs.iter_mut().enumerate() {
        if state.buckets[b + i].members.is_empty() || state.buckets[b + i + 1].members.is_empty() {
            sub.state = MSubState::Finished;
        }
    }
    state.subs.splice(b..b + 1, new_subs);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(colors: &[MultiColor], gammas: &[&str]) -> MultiInstance {
        let colored_ranks: Vec<(MultiColor, u32)> =
            colors.iter().enumerate().map(|(r, c)| (*c, r as u32)).collect();
        MultiInstance::new(colored_ranks, gammas.iter().map(|g| g.parse().unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn parse_round_trip_and_validation() {
        let i = inst(&[1, 2, 3, 2, 1], &["2", "3.5", "inf"]);
        let text = i.to_text();
        let back: MultiInstance = text.parse().unwrap();
        assert_eq!(back, i);

        assert!(MultiInstance::new(vec![(1, 0)], vec![Cost::from_int(2)]).is_err());
        assert!(MultiInstance::new(
            vec![(1, 0), (3, 1)],
            vec![Cost::from_int(2), Cost::from_int(2)]
        )
        .is_err());
        assert!(MultiInstance::new(
            vec![(1, 0), (2, 0)],
            vec![Cost::from_int(2), Cost::from_int(2)]
        )
        .is_err());
        assert!(MultiInstance::new(
            vec![(1, 0), (2, 1)],
            vec![Cost::ONE, Cost::from_int(2)]
        )
        .is_err());
    }

    #[test]
    fn hamiltonian_mixes_prices() {
        // sorted colors 1,1,2,3,3 with gammas 2,3,5 -> 2 + 1 + 1 + 5
        let i = inst(&[1, 1, 2, 3, 3], &["2", "3", "5"]);
        assert_eq!(i.hamiltonian_cost(), Cost::from_int(9));
    }

    #[test]
    fn single_color_reduces_to_merge_sort() {
        let colored: Vec<(MultiColor, u32)> = [3u32, 0, 2, 1].iter().map(|r| (2, *r)).collect();
        let i = MultiInstance::new(colored, vec![Cost::from_int(2), Cost::from_int(2)]).unwrap();
        let run = multichromatic_sort(&i, 5).unwrap();
        assert_eq!(run.order, i.true_sorted());
        assert_eq!(run.report.search_cost, Cost::ZERO);
        assert_eq!(run.report.total_cost, run.report.stripe_sort_cost);
    }

    #[test]
    fn three_colors_sort_correctly() {
        let colors: Vec<MultiColor> =
            vec![1, 2, 3, 3, 2, 1, 1, 2, 3, 1, 2, 3, 2, 2, 1, 3, 3, 1, 2, 1];
        let i = inst(&colors, &["2", "4", "8"]);
        for seed in 0..30 {
            let run = multichromatic_sort(&i, seed).unwrap();
            assert_eq!(run.order, i.true_sorted(), "seed {seed}");
            let sum = run.report.pivot_cost
                + run.report.search_cost
                + run.report.certificate_cost
                + run.report.stripe_sort_cost;
            assert_eq!(sum, run.report.total_cost);
        }
    }

    #[test]
    fn infinite_price_singleton_stripes_are_fine() {
        // color 2 has infinite price but only singleton stripes
        let i = inst(&[1, 2, 1, 2, 1], &["2", "inf"]);
        let run = multichromatic_sort(&i, 1).unwrap();
        assert_eq!(run.order, i.true_sorted());

        // a two-key stripe of the infinite color cannot be resolved
        let bad = inst(&[1, 2, 2, 1], &["2", "inf"]);
        assert!(matches!(
            multichromatic_sort(&bad, 1),
            Err(MultiError::InfinitePriceStripe { color: 2, len: 2 })
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let colors: Vec<MultiColor> = vec![1, 2, 3, 1, 2, 3, 2, 1, 3, 2, 1, 3];
        let i = inst(&colors, &["3", "3", "3"]);
        let a = multichromatic_sort(&i, 9).unwrap();
        let b = multichromatic_sort(&i, 9).unwrap();
        assert_eq!(a, b);
    }
}
