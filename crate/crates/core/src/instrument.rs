//! Ground-truth instrumentation: functions that read the hidden ranks.
//!
//! Everything here exists for generators, verifiers, reports, and tests.
//! None of it charges the ledger, and algorithm code must not call it to
//! make decisions; keeping these entry points in one module makes that
//! separation auditable.

use crate::cost::Cost;
use crate::instance::{Color, KeyId, PricedInstance};

/// Keys ordered by hidden rank. Never charges a ledger.
pub fn true_sorted(instance: &PricedInstance) -> Vec<KeyId> {
    let mut by_rank = vec![KeyId(0); instance.len()];
    for k in instance.keys() {
        by_rank[k.rank as usize] = k.id;
    }
    by_rank
}

/// Maximal monochromatic runs of the true sorted order, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripeDecomposition {
    pub stripes: Vec<(Color, Vec<KeyId>)>,
}

impl StripeDecomposition {
    pub fn len(&self) -> usize {
        self.stripes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stripes.is_empty()
    }

    /// Concatenation of all stripes; equals the true sorted order.
    pub fn concat(&self) -> Vec<KeyId> {
        self.stripes.iter().flat_map(|(_, s)| s.iter().copied()).collect()
    }
}

pub fn stripes(instance: &PricedInstance) -> StripeDecomposition {
    let sorted = true_sorted(instance);
    let mut out: Vec<(Color, Vec<KeyId>)> = Vec::new();
    for id in sorted {
        let color = instance.color(id).expect("key from true_sorted");
        match out.last_mut() {
            Some((c, run)) if *c == color => run.push(id),
            _ => out.push((color, vec![id])),
        }
    }
    StripeDecomposition { stripes: out }
}

/// Sum of comparison prices over adjacent pairs of the true sorted order:
/// the cost of the cheapest proof of sortedness. Returns 0 for `N < 2`.
pub fn hamiltonian_cost(instance: &PricedInstance) -> Cost {
    let sorted = true_sorted(instance);
    let mut total = Cost::ZERO;
    for pair in sorted.windows(2) {
        let a = instance.color(pair[0]).unwrap();
        let b = instance.color(pair[1]).unwrap();
        total += match (a, b) {
            (Color::Red, Color::Red) => instance.alpha(),
            (Color::Blue, Color::Blue) => instance.beta(),
            _ => Cost::ONE,
        };
    }
    total
}

/// Hidden rank extended to sentinels (`-inf` / `+inf`). Instrumentation only.
pub fn rank_ext(instance: &PricedInstance, id: KeyId) -> i64 {
    instance.rank_ext(id)
}

/// Per-color sorted rank lists plus stripe membership, precomputed once so
/// per-round instrumentation stays cheap.
pub struct GroundTruth {
    red_ranks: Vec<u32>,
    blue_ranks: Vec<u32>,
    /// stripe index by rank position
    stripe_of_rank: Vec<u32>,
    /// (color, size, lowest rank, highest rank) per stripe
    stripe_sizes: Vec<(Color, u32, u32, u32)>,
}

impl GroundTruth {
    pub fn new(instance: &PricedInstance) -> GroundTruth {
        let decomposition = stripes(instance);
        let mut stripe_of_rank = vec![0u32; instance.len()];
        let mut stripe_sizes = Vec::with_capacity(decomposition.len());
        let mut next_rank = 0u32;
        for (idx, (color, members)) in decomposition.stripes.iter().enumerate() {
            for id in members {
                stripe_of_rank[instance.rank(*id).unwrap() as usize] = idx as u32;
            }
            let lo = next_rank;
            next_rank += members.len() as u32;
            stripe_sizes.push((*color, members.len() as u32, lo, next_rank - 1));
        }
        let mut red_ranks: Vec<u32> =
            instance.keys().iter().filter(|k| k.color == Color::Red).map(|k| k.rank).collect();
        let mut blue_ranks: Vec<u32> =
            instance.keys().iter().filter(|k| k.color == Color::Blue).map(|k| k.rank).collect();
        red_ranks.sort_unstable();
        blue_ranks.sort_unstable();
        GroundTruth { red_ranks, blue_ranks, stripe_of_rank, stripe_sizes }
    }

    /// Number of `color` keys with rank strictly inside `(lo, hi)`.
    pub fn count_between(&self, color: Color, lo: i64, hi: i64) -> u32 {
        let ranks = match color {
            Color::Red => &self.red_ranks,
            Color::Blue => &self.blue_ranks,
        };
        let lo_idx = ranks.partition_point(|&r| (r as i64) <= lo);
        let hi_idx = ranks.partition_point(|&r| (r as i64) < hi);
        (hi_idx - lo_idx) as u32
    }

    /// `(color, size)` of the stripe containing the key at `rank`.
    pub fn stripe_size_at(&self, rank: u32) -> (Color, u32) {
        let idx = self.stripe_of_rank[rank as usize] as usize;
        let (c, s, _, _) = self.stripe_sizes[idx];
        (c, s)
    }

    /// `(lowest, highest)` ranks of the stripe containing the key at `rank`.
    pub fn stripe_bounds_at(&self, rank: u32) -> (u32, u32) {
        let idx = self.stripe_of_rank[rank as usize] as usize;
        let (_, _, lo, hi) = self.stripe_sizes[idx];
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::PricedInstance;

    fn inst(colors: &str, ranks: &[u32], alpha: &str, beta: &str) -> PricedInstance {
        let pairs = colors
            .chars()
            .zip(ranks.iter().copied())
            .map(|(c, r)| (if c == 'R' { Color::Red } else { Color::Blue }, r))
            .collect();
        PricedInstance::new(pairs, alpha.parse().unwrap(), beta.parse().unwrap()).unwrap()
    }

    #[test]
    fn true_sorted_inverts_ranks() {
        // ranks (2,0,1) -> ids ordered (1,2,0)
        let i = inst("RRR", &[2, 0, 1], "2", "2");
        assert_eq!(true_sorted(&i), vec![KeyId(1), KeyId(2), KeyId(0)]);
        let single = inst("B", &[0], "2", "2");
        assert_eq!(true_sorted(&single), vec![KeyId(0)]);
        let ident = inst("RB", &[0, 1], "2", "2");
        assert_eq!(true_sorted(&ident), vec![KeyId(0), KeyId(1)]);
    }

    #[test]
    fn stripe_decomposition_examples() {
        // sorted colors R,R,B,R,B -> stripes [RR],[B],[R],[B]
        let i = inst("RRBRB", &[0, 1, 2, 3, 4], "2", "2");
        let s = stripes(&i);
        let sizes: Vec<(Color, usize)> =
            s.stripes.iter().map(|(c, m)| (*c, m.len())).collect();
        assert_eq!(
            sizes,
            vec![
                (Color::Red, 2),
                (Color::Blue, 1),
                (Color::Red, 1),
                (Color::Blue, 1)
            ]
        );
        assert_eq!(s.concat(), true_sorted(&i));

        let all_red = inst("RRRRR", &[4, 3, 2, 1, 0], "2", "2");
        assert_eq!(stripes(&all_red).len(), 1);

        let alternating = inst("RBRB", &[0, 1, 2, 3], "2", "2");
        assert_eq!(stripes(&alternating).len(), 4);
    }

    #[test]
    fn hamiltonian_examples() {
        // sorted colors R,R,B,B,R with alpha=3, beta=5 -> 3+1+5+1 = 10
        let i = inst("RRBBR", &[0, 1, 2, 3, 4], "3", "5");
        assert_eq!(hamiltonian_cost(&i), Cost::from_int(10));

        let alt = inst("RBRB", &[0, 1, 2, 3], "100", "250");
        assert_eq!(hamiltonian_cost(&alt), Cost::from_int(3));

        let all_red = inst("RRRR", &[1, 0, 3, 2], "2", "9");
        assert_eq!(hamiltonian_cost(&all_red), Cost::from_int(6));

        let single = inst("R", &[0], "2", "2");
        assert_eq!(hamiltonian_cost(&single), Cost::ZERO);
    }

    #[test]
    fn ground_truth_counts() {
        let i = inst("RRBRB", &[0, 1, 2, 3, 4], "2", "2");
        let gt = GroundTruth::new(&i);
        assert_eq!(gt.count_between(Color::Red, -1, 5), 3);
        assert_eq!(gt.count_between(Color::Red, 0, 3), 1);
        assert_eq!(gt.count_between(Color::Blue, 1, 4), 1);
        assert_eq!(gt.stripe_size_at(0), (Color::Red, 2));
        assert_eq!(gt.stripe_size_at(2), (Color::Blue, 1));
    }
}
