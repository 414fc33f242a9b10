//! The charging comparison oracle and its exact cost ledger.
//!
//! Every comparison an algorithm makes flows through [`ComparisonOracle`],
//! which answers from the hidden ranks and charges the ledger by the color
//! pair. Comparisons involving either artificial sentinel are answered for
//! free. The ledger keeps per-phase counts so a run report can split its
//! total into search / pivot / certificate / stripe-sort components that sum
//! exactly.

use thiserror::Error;

use crate::cost::Cost;
use crate::instance::{Color, KeyId, PricedInstance};

/// Outcome of a comparison. Ranks are distinct, so equality cannot occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Less,
    Greater,
}

impl Outcome {
    pub fn is_less(self) -> bool {
        self == Outcome::Less
    }
}

/// Accounting bucket for a charged comparison. Which phase is active is
/// driven by the caller; the split is bookkeeping only and never changes
/// what a comparison costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Search,
    Pivot,
    Certificate,
    StripeSort,
}

pub const PHASES: [Phase; 4] = [Phase::Search, Phase::Pivot, Phase::Certificate, Phase::StripeSort];

impl Phase {
    fn index(self) -> usize {
        match self {
            Phase::Search => 0,
            Phase::Pivot => 1,
            Phase::Certificate => 2,
            Phase::StripeSort => 3,
        }
    }
}

const CAT_RR: usize = 0;
const CAT_BB: usize = 1;
const CAT_RB: usize = 2;

/// Exact per-category comparison counts and the prices needed to value them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostLedger {
    counts: [[u64; 3]; 4],
    sentinel: u64,
    alpha: Cost,
    beta: Cost,
}

impl CostLedger {
    pub fn new(alpha: Cost, beta: Cost) -> CostLedger {
        CostLedger { counts: [[0; 3]; 4], sentinel: 0, alpha, beta }
    }

    fn charge(&mut self, phase: Phase, a: Color, b: Color) {
        let cat = match (a, b) {
            (Color::Red, Color::Red) => CAT_RR,
            (Color::Blue, Color::Blue) => CAT_BB,
            _ => CAT_RB,
        };
        self.counts[phase.index()][cat] += 1;
    }

    fn charge_sentinel(&mut self) {
        self.sentinel += 1;
    }

    pub fn count_rr(&self) -> u64 {
        self.counts.iter().map(|p| p[CAT_RR]).sum()
    }

    pub fn count_bb(&self) -> u64 {
        self.counts.iter().map(|p| p[CAT_BB]).sum()
    }

    pub fn count_rb(&self) -> u64 {
        self.counts.iter().map(|p| p[CAT_RB]).sum()
    }

    pub fn count_sentinel(&self) -> u64 {
        self.sentinel
    }

    pub fn charged_total_count(&self) -> u64 {
        self.count_rr() + self.count_bb() + self.count_rb()
    }

    /// `alpha * count_rr + beta * count_bb + count_rb`, exactly.
    pub fn total_cost(&self) -> Cost {
        self.alpha.mul_count(self.count_rr())
            + self.beta.mul_count(self.count_bb())
            + Cost::from_int(self.count_rb())
    }

    /// Exact cost of the comparisons charged under one phase.
    pub fn phase_cost(&self, phase: Phase) -> Cost {
        let p = &self.counts[phase.index()];
        self.alpha.mul_count(p[CAT_RR]) + self.beta.mul_count(p[CAT_BB]) + Cost::from_int(p[CAT_RB])
    }

    /// Bichromatic comparisons charged under one phase.
    pub fn phase_cross_count(&self, phase: Phase) -> u64 {
        self.counts[phase.index()][CAT_RB]
    }

    /// Snapshot of the charged counts, for attributing cost deltas.
    pub fn counts_snapshot(&self) -> [u64; 3] {
        [self.count_rr(), self.count_bb(), self.count_rb()]
    }

    /// Exact cost of the comparisons charged since `snap` was taken.
    pub fn cost_since(&self, snap: [u64; 3]) -> Cost {
        self.alpha.mul_count(self.count_rr() - snap[0])
            + self.beta.mul_count(self.count_bb() - snap[1])
            + Cost::from_int(self.count_rb() - snap[2])
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("cannot compare a key with itself: {0}")]
    SameKey(KeyId),
    #[error("unknown key id {0}")]
    UnknownKey(KeyId),
}

/// Answers comparisons from the hidden total order, charging the ledger.
///
/// The oracle owns a private copy of the ranks; it exposes no way to read
/// them back, so code holding only an oracle cannot consult ground truth.
pub struct ComparisonOracle {
    rank: Vec<u32>,
    color: Vec<Color>,
    ledger: CostLedger,
    phase: Phase,
}

impl ComparisonOracle {
    pub fn new(instance: &PricedInstance) -> ComparisonOracle {
        let mut rank = vec![0u32; instance.len()];
        let mut color = vec![Color::Red; instance.len()];
        for k in instance.keys() {
            rank[k.id.0 as usize] = k.rank;
            color[k.id.0 as usize] = k.color;
        }
        ComparisonOracle {
            rank,
            color,
            ledger: CostLedger::new(instance.alpha(), instance.beta()),
            phase: Phase::Search,
        }
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn alpha(&self) -> Cost {
        self.ledger.alpha
    }

    pub fn beta(&self) -> Cost {
        self.ledger.beta
    }

    pub fn mono_price(&self, color: Color) -> Cost {
        match color {
            Color::Red => self.ledger.alpha,
            Color::Blue => self.ledger.beta,
        }
    }

    pub fn color(&self, id: KeyId) -> Result<Color, OracleError> {
        match id {
            crate::instance::RED_SENTINEL => Ok(Color::Red),
            crate::instance::BLUE_SENTINEL => Ok(Color::Blue),
            KeyId(i) => self
                .color
                .get(i as usize)
                .copied()
                .ok_or(OracleError::UnknownKey(id)),
        }
    }

    fn rank_ext(&self, id: KeyId) -> Result<i64, OracleError> {
        match id {
            crate::instance::RED_SENTINEL => Ok(i64::MIN),
            crate::instance::BLUE_SENTINEL => Ok(i64::MAX),
            KeyId(i) => self
                .rank
                .get(i as usize)
                .map(|r| *r as i64)
                .ok_or(OracleError::UnknownKey(id)),
        }
    }

    /// Compare two distinct keys. Returns `Less` iff `a` precedes `b` in the
    /// hidden order. Sentinel comparisons are recorded but never charged.
    pub fn compare(&mut self, a: KeyId, b: KeyId) -> Result<Outcome, OracleError> {
        if a == b {
            return Err(OracleError::SameKey(a));
        }
        let ra = self.rank_ext(a)?;
        let rb = self.rank_ext(b)?;
        if a.is_sentinel() || b.is_sentinel() {
            self.ledger.charge_sentinel();
        } else {
            let ca = self.color(a)?;
            let cb = self.color(b)?;
            self.ledger.charge(self.phase, ca, cb);
        }
        Ok(if ra < rb { Outcome::Less } else { Outcome::Greater })
    }

    /// Infallible comparison for algorithm internals that only ever pass
    /// ids they obtained from the instance.
    pub(crate) fn cmp(&mut self, a: KeyId, b: KeyId) -> Outcome {
        self.compare(a, b).expect("comparison between valid, distinct keys")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{BLUE_SENTINEL, RED_SENTINEL};

    fn inst(colors: &str, ranks: &[u32], alpha: &str, beta: &str) -> PricedInstance {
        let pairs = colors
            .chars()
            .zip(ranks.iter().copied())
            .map(|(c, r)| (if c == 'R' { Color::Red } else { Color::Blue }, r))
            .collect();
        PricedInstance::new(pairs, alpha.parse().unwrap(), beta.parse().unwrap()).unwrap()
    }

    #[test]
    fn bichromatic_comparison_costs_one() {
        let i = inst("RB", &[0, 1], "5", "7");
        let mut o = ComparisonOracle::new(&i);
        assert_eq!(o.compare(KeyId(0), KeyId(1)).unwrap(), Outcome::Less);
        assert_eq!(o.ledger().total_cost(), Cost::from_int(1));
    }

    #[test]
    fn monochromatic_comparison_costs_alpha() {
        // red with rank 3 vs red with rank 1
        let i = inst("RRBB", &[3, 1, 0, 2], "5", "7");
        let mut o = ComparisonOracle::new(&i);
        assert_eq!(o.compare(KeyId(0), KeyId(1)).unwrap(), Outcome::Greater);
        assert_eq!(o.ledger().total_cost(), Cost::from_int(5));
        assert_eq!(o.ledger().count_rr(), 1);
    }

    #[test]
    fn sentinel_comparisons_are_free() {
        let i = inst("RB", &[0, 1], "5", "7");
        let mut o = ComparisonOracle::new(&i);
        assert_eq!(o.compare(RED_SENTINEL, KeyId(1)).unwrap(), Outcome::Less);
        assert_eq!(o.compare(BLUE_SENTINEL, KeyId(0)).unwrap(), Outcome::Greater);
        assert_eq!(o.compare(RED_SENTINEL, BLUE_SENTINEL).unwrap(), Outcome::Less);
        assert_eq!(o.ledger().total_cost(), Cost::ZERO);
        assert_eq!(o.ledger().count_sentinel(), 3);
    }

    #[test]
    fn invalid_arguments_error() {
        let i = inst("RB", &[0, 1], "5", "7");
        let mut o = ComparisonOracle::new(&i);
        assert_eq!(o.compare(KeyId(0), KeyId(0)), Err(OracleError::SameKey(KeyId(0))));
        assert_eq!(o.compare(KeyId(0), KeyId(9)), Err(OracleError::UnknownKey(KeyId(9))));
        // errors never charge
        assert_eq!(o.ledger().charged_total_count(), 0);
    }

    #[test]
    fn phase_costs_sum_to_total() {
        let i = inst("RRBB", &[0, 2, 1, 3], "3", "4");
        let mut o = ComparisonOracle::new(&i);
        o.set_phase(Phase::Search);
        o.cmp(KeyId(0), KeyId(2));
        o.set_phase(Phase::Pivot);
        o.cmp(KeyId(0), KeyId(1));
        o.set_phase(Phase::StripeSort);
        o.cmp(KeyId(2), KeyId(3));
        let total: Cost = PHASES.iter().map(|p| o.ledger().phase_cost(*p)).sum();
        assert_eq!(total, o.ledger().total_cost());
        assert_eq!(o.ledger().total_cost(), Cost::from_int(1 + 3 + 4));
    }
}
