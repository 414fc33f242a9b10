//! The backbone: an alternating list of representatives with their buckets
//! and the active-subproblem bookkeeping between adjacent buckets.
//!
//! Representatives are bounded by the artificial smallest red and largest
//! blue element. Every non-representative key sits in exactly one bucket:
//! the same-colored keys known (through charged comparisons) to lie strictly
//! between the bucket's neighboring opposite-color representatives.

use thiserror::Error;

use crate::cost::{Cost, Rat};
use crate::instance::{Color, KeyId, PricedInstance, BLUE_SENTINEL, RED_SENTINEL};
use crate::instrument;
use crate::oracle::{ComparisonOracle, Outcome};

/// One representative and the same-colored keys assigned to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    pub(crate) rep: KeyId,
    pub(crate) color: Color,
    /// Bucket members; the first `sampled_len` entries form the sample.
    pub(crate) members: Vec<KeyId>,
    pub(crate) sampled_len: usize,
    /// Extremes of sample ∪ {rep}, maintained by charged comparisons.
    pub(crate) sample_max: KeyId,
    pub(crate) sample_min: KeyId,
    /// Sampling credit: grows by 1 per active round, pays the color's price
    /// per drawn sample.
    pub(crate) credit: Rat,
}

impl Bucket {
    pub(crate) fn new(rep: KeyId, color: Color, members: Vec<KeyId>) -> Bucket {
        Bucket {
            rep,
            color,
            members,
            sampled_len: 0,
            sample_max: rep,
            sample_min: rep,
            credit: Rat::from_integer(0),
        }
    }

    pub fn rep(&self) -> KeyId {
        self.rep
    }

    pub fn color(&self) -> Color {
        self.color
    }

    pub fn members(&self) -> &[KeyId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn sample_max(&self) -> KeyId {
        self.sample_max
    }

    pub fn sample_min(&self) -> KeyId {
        self.sample_min
    }

    pub fn sampled(&self) -> &[KeyId] {
        &self.members[..self.sampled_len]
    }

    fn reset_sample(&mut self) {
        self.sampled_len = 0;
        self.sample_max = self.rep;
        self.sample_min = self.rep;
        self.credit = Rat::from_integer(0);
    }
}

/// Whether a subproblem still needs work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubState {
    Active,
    Finished,
}

/// The pair of adjacent buckets between two neighboring representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subproblem {
    pub(crate) state: SubState,
    /// Round index at creation; the certificate triggers on age.
    pub(crate) mark: u64,
    /// Cost attributed to this subproblem's searches (reporting only).
    pub(crate) accumulated_cost: Cost,
    /// Refinement-tree node this subproblem corresponds to.
    pub(crate) node: u32,
}

impl Subproblem {
    fn new(mark: u64, node: u32) -> Subproblem {
        Subproblem { state: SubState::Active, mark, accumulated_cost: Cost::ZERO, node }
    }

    pub fn state(&self) -> SubState {
        self.state
    }

    pub fn is_active(&self) -> bool {
        self.state == SubState::Active
    }

    pub fn mark(&self) -> u64 {
        self.mark
    }

    pub fn accumulated_cost(&self) -> Cost {
        self.accumulated_cost
    }

    pub fn node(&self) -> u32 {
        self.node
    }
}

#[derive(Debug, Error)]
pub enum BackboneError {
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Pass/fail result of the ground-truth backbone checks.
#[derive(Debug, Clone, Default)]
pub struct InvariantReport {
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The alternating representative list with buckets and subproblems.
///
/// `buckets[i]` belongs to the i-th representative; `subs[i]` is the
/// subproblem between representatives i and i+1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Backbone {
    pub(crate) buckets: Vec<Bucket>,
    pub(crate) subs: Vec<Subproblem>,
}

impl Backbone {
    /// The trivial backbone: both sentinels, all reds in the red sentinel's
    /// bucket, all blues in the blue sentinel's, one subproblem marked 0.
    /// No comparisons are charged.
    pub fn init(reds: Vec<KeyId>, blues: Vec<KeyId>, root_node: u32) -> Backbone {
        Backbone {
            buckets: vec![
                Bucket::new(RED_SENTINEL, Color::Red, reds),
                Bucket::new(BLUE_SENTINEL, Color::Blue, blues),
            ],
            subs: vec![Subproblem::new(0, root_node)],
        }
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn bucket(&self, pos: usize) -> &Bucket {
        &self.buckets[pos]
    }

    pub(crate) fn bucket_mut(&mut self, pos: usize) -> &mut Bucket {
        &mut self.buckets[pos]
    }

    pub fn n_boundaries(&self) -> usize {
        self.subs.len()
    }

    pub fn sub(&self, boundary: usize) -> &Subproblem {
        &self.subs[boundary]
    }

    pub(crate) fn sub_mut(&mut self, boundary: usize) -> &mut Subproblem {
        &mut self.subs[boundary]
    }

    pub fn has_active(&self) -> bool {
        self.subs.iter().any(|s| s.is_active())
    }

    /// Boundaries of active subproblems, left to right.
    pub fn active_boundaries(&self) -> Vec<usize> {
        self.subs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_active())
            .map(|(i, _)| i)
            .collect()
    }

    /// A bucket is active while it borders at least one active subproblem.
    pub fn bucket_is_active(&self, pos: usize) -> bool {
        (pos > 0 && self.subs[pos - 1].is_active())
            || (pos < self.subs.len() && self.subs[pos].is_active())
    }

    /// Positions of active buckets, left to right.
    pub fn active_bucket_positions(&self) -> Vec<usize> {
        (0..self.buckets.len()).filter(|p| self.bucket_is_active(*p)).collect()
    }

    /// Splits the subproblem at `boundary` with the proved inversion
    /// `u_i < y < x < u_{i+1}`, where `y` is a member of the right bucket
    /// and `x` of the left. Each displaced member is compared once against
    /// the one new opposite-color representative that decides its bucket.
    /// The subproblem is replaced by three new ones marked `round` and tied
    /// to `nodes`; new subproblems with an empty side are finished on the
    /// spot (their certificate costs nothing).
    ///
    /// The caller is responsible for setting the oracle's pivot phase.
    pub fn insert_inversion(
        &mut self,
        boundary: usize,
        y: KeyId,
        x: KeyId,
        oracle: &mut ComparisonOracle,
        round: u64,
        nodes: [u32; 3],
    ) -> Result<(), BackboneError> {
        if !self.subs[boundary].is_active() {
            return Err(BackboneError::Internal(format!(
                "insert into inactive subproblem at boundary {boundary}"
            )));
        }
        let left_pos = boundary;
        let right_pos = boundary + 1;
        let x_idx = self.buckets[left_pos].members.iter().position(|&k| k == x);
        let y_idx = self.buckets[right_pos].members.iter().position(|&k| k == y);
        let (Some(x_idx), Some(y_idx)) = (x_idx, y_idx) else {
            return Err(BackboneError::Internal(format!(
                "inversion endpoints ({y}, {x}) not members of boundary {boundary}"
            )));
        };

        let left_color = self.buckets[left_pos].color;
        let right_color = self.buckets[right_pos].color;
        self.buckets[left_pos].members.swap_remove(x_idx);
        self.buckets[right_pos].members.swap_remove(y_idx);

        // Place old left-bucket members around the new opposite-color rep y.
        let mut keep_left = Vec::new();
        let mut x_bucket = Vec::new();
        for m in std::mem::take(&mut self.buckets[left_pos].members) {
            if oracle.cmp(m, y) == Outcome::Less {
                keep_left.push(m);
            } else {
                x_bucket.push(m);
            }
        }
        // Place old right-bucket members around the new opposite-color rep x.
        let mut y_bucket = Vec::new();
        let mut keep_right = Vec::new();
        for m in std::mem::take(&mut self.buckets[right_pos].members) {
            if oracle.cmp(m, x) == Outcome::Less {
                y_bucket.push(m);
            } else {
                keep_right.push(m);
            }
        }

        let left = &mut self.buckets[left_pos];
        left.members = keep_left;
        left.reset_sample();
        let right = &mut self.buckets[right_pos];
        right.members = keep_right;
        right.reset_sample();

        self.buckets.splice(
            right_pos..right_pos,
            [
                Bucket::new(y, right_color, y_bucket),
                Bucket::new(x, left_color, x_bucket),
            ],
        );

        let mut new_subs =
            [Subproblem::new(round, nodes[0]), Subproblem::new(round, nodes[1]), Subproblem::new(round, nodes[2])];
        for (i, sub) in new_subs.iter_mut().enumerate() {
            let l = &self.buckets[boundary + i];
            let r = &self.buckets[boundary + i + 1];
            if l.is_empty() || r.is_empty() {
                sub.state = SubState::Finished;
            }
        }
        self.subs.splice(boundary..boundary + 1, new_subs);
        Ok(())
    }

    /// Representatives with colors and bucket sizes, one token each:
    /// `id:color:bucket_size`.
    pub fn export_snapshot(&self) -> String {
        self.buckets
            .iter()
            .map(|b| format!("{}:{}:{}", b.rep, b.color.letter(), b.members.len()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Ground-truth verification of every structural invariant: alternation,
    /// sentinel bounds, representative order, bucket membership bounds, the
    /// key partition, transitive bucket ordering at distance ≥ 2, and sample
    /// extreme maintenance.
    pub fn check_invariants(&self, instance: &PricedInstance) -> InvariantReport {
        let mut report = InvariantReport::default();
        let mut push = |msg: String| report.violations.push(msg);

        if self.buckets.first().map(|b| b.rep) != Some(RED_SENTINEL) {
            push("backbone does not start at the red sentinel".into());
        }
        if self.buckets.last().map(|b| b.rep) != Some(BLUE_SENTINEL) {
            push("backbone does not end at the blue sentinel".into());
        }
        for w in self.buckets.windows(2) {
            if w[0].color == w[1].color {
                push(format!("colors do not alternate at reps {} and {}", w[0].rep, w[1].rep));
            }
            if instrument::rank_ext(instance, w[0].rep) >= instrument::rank_ext(instance, w[1].rep)
            {
                push(format!("representatives out of order: {} !< {}", w[0].rep, w[1].rep));
            }
        }
        if self.subs.len() + 1 != self.buckets.len() {
            push(format!(
                "subproblem count {} does not match {} representatives",
                self.subs.len(),
                self.buckets.len()
            ));
        }

        // Membership bounds against neighboring reps, plus color purity.
        for (i, b) in self.buckets.iter().enumerate() {
            let lo = if i == 0 {
                i64::MIN
            } else {
                instrument::rank_ext(instance, self.buckets[i - 1].rep)
            };
            let hi = if i + 1 == self.buckets.len() {
                i64::MAX
            } else {
                instrument::rank_ext(instance, self.buckets[i + 1].rep)
            };
            for &m in &b.members {
                if instance.color(m) != Some(b.color) {
                    push(format!("member {m} has the wrong color for bucket of {}", b.rep));
                }
                let r = instrument::rank_ext(instance, m);
                if r <= lo || r >= hi {
                    push(format!(
                        "member {m} of bucket {} lies outside its representative interval",
                        b.rep
                    ));
                }
            }
            // Sample extremes are the true extremes of sample ∪ {rep}.
            let mut sample: Vec<KeyId> = b.sampled().to_vec();
            sample.push(b.rep);
            let max = sample.iter().copied().max_by_key(|k| instrument::rank_ext(instance, *k));
            let min = sample.iter().copied().min_by_key(|k| instrument::rank_ext(instance, *k));
            if max != Some(b.sample_max) || min != Some(b.sample_min) {
                push(format!("sample extremes of bucket {} are stale", b.rep));
            }
        }

        // Partition: representatives plus bucket members cover each key once.
        let mut seen = vec![0u32; instance.len()];
        for b in &self.buckets {
            if !b.rep.is_sentinel() {
                seen[b.rep.0 as usize] += 1;
            }
            for &KeyId(i) in &b.members {
                seen[i as usize] += 1;
            }
        }
        for (i, count) in seen.iter().enumerate() {
            if *count != 1 {
                push(format!("key {i} appears {count} times across the backbone"));
            }
        }

        // Buckets at index distance >= 2 are fully ordered.
        let ranges: Vec<Option<(i64, i64)>> = self
            .buckets
            .iter()
            .map(|b| {
                let ranks: Vec<i64> =
                    b.members.iter().map(|m| instrument::rank_ext(instance, *m)).collect();
                ranks.iter().copied().min().zip(ranks.iter().copied().max())
            })
            .collect();
        let mut suffix_min = vec![i64::MAX; self.buckets.len() + 1];
        for i in (0..self.buckets.len()).rev() {
            suffix_min[i] = suffix_min[i + 1].min(ranges[i].map_or(i64::MAX, |r| r.0));
        }
        for i in 0..self.buckets.len() {
            if let Some((_, max_i)) = ranges[i] {
                if i + 2 < self.buckets.len() && max_i >= suffix_min[i + 2] {
                    // locate one violating pair for the report
                    let x = self.buckets[i]
                        .members
                        .iter()
                        .copied()
                        .max_by_key(|m| instrument::rank_ext(instance, *m))
                        .unwrap();
                    let y = self
                        .buckets
                        .iter()
                        .skip(i + 2)
                        .flat_map(|b| b.members.iter().copied())
                        .min_by_key(|m| instrument::rank_ext(instance, *m))
                        .unwrap();
                    push(format!(
                        "buckets at distance >= 2 are not ordered: {x} (bucket {}) !< {y}",
                        self.buckets[i].rep
                    ));
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Phase;

    /// Instance whose colors are given in rank order with identity ids.
    pub(crate) fn inst(colors: &str, alpha: &str, beta: &str) -> PricedInstance {
        let pairs = colors
            .chars()
            .enumerate()
            .map(|(r, c)| (if c == 'R' { Color::Red } else { Color::Blue }, r as u32))
            .collect();
        PricedInstance::new(pairs, alpha.parse().unwrap(), beta.parse().unwrap()).unwrap()
    }

    fn init_from(instance: &PricedInstance) -> Backbone {
        Backbone::init(instance.ids_of(Color::Red), instance.ids_of(Color::Blue), 0)
    }

    #[test]
    fn trivial_backbone_layout() {
        let i = inst("RRB", "2", "2");
        let bb = init_from(&i);
        assert_eq!(bb.len(), 2);
        assert_eq!(bb.bucket(0).len(), 2);
        assert_eq!(bb.bucket(1).len(), 1);
        assert_eq!(bb.n_boundaries(), 1);
        assert!(bb.sub(0).is_active());
        assert_eq!(bb.sub(0).mark(), 0);
        assert!(bb.check_invariants(&i).passed());
    }

    #[test]
    fn trivial_backbone_with_empty_colors() {
        let bb = Backbone::init(vec![], vec![], 0);
        assert_eq!(bb.len(), 2);
        assert!(bb.bucket(0).is_empty() && bb.bucket(1).is_empty());
        assert_eq!(bb.n_boundaries(), 1);

        let bb = Backbone::init(vec![KeyId(0)], vec![], 0);
        assert_eq!(bb.bucket(0).len(), 1);
        assert!(bb.sub(0).is_active());
    }

    #[test]
    fn insert_inversion_splits_buckets_and_charges() {
        // true order: B0 R1 B2 R3 (ids = ranks); inversion (y=B0, x=R3)
        let i = inst("BRBR", "5", "7");
        let mut bb = init_from(&i);
        let mut o = ComparisonOracle::new(&i);
        o.set_phase(Phase::Pivot);
        bb.insert_inversion(0, KeyId(0), KeyId(3), &mut o, 1, [1, 2, 3]).unwrap();

        assert_eq!(bb.len(), 4);
        assert_eq!(bb.bucket(1).rep(), KeyId(0));
        assert_eq!(bb.bucket(2).rep(), KeyId(3));
        // R1 lands between y and x, i.e. in x's bucket; B2 in y's bucket
        assert_eq!(bb.bucket(2).members(), &[KeyId(1)]);
        assert_eq!(bb.bucket(1).members(), &[KeyId(2)]);
        assert!(bb.bucket(0).is_empty() && bb.bucket(3).is_empty());
        assert!(bb.check_invariants(&i).passed());

        // one placement comparison per displaced member, all bichromatic,
        // within the 2(|L|+|R|)-2 bound
        assert_eq!(o.ledger().count_rb(), 2);
        assert!(o.ledger().count_rb() <= 2 * 4 - 2);

        // empty-sided children finished immediately, middle child active
        assert_eq!(bb.sub(0).state(), SubState::Finished);
        assert!(bb.sub(1).is_active());
        assert_eq!(bb.sub(2).state(), SubState::Finished);
        assert_eq!(bb.sub(1).mark(), 1);
    }

    #[test]
    fn insert_requires_member_endpoints() {
        let i = inst("RB", "2", "2");
        let mut bb = init_from(&i);
        let mut o = ComparisonOracle::new(&i);
        let err = bb.insert_inversion(0, KeyId(9), KeyId(0), &mut o, 1, [1, 2, 3]);
        assert!(matches!(err, Err(BackboneError::Internal(_))));
    }

    #[test]
    fn swapped_members_fail_invariants_with_pair() {
        let i = inst("RRBB", "2", "2");
        let mut bb = init_from(&i);
        assert!(bb.check_invariants(&i).passed());
        // swap a red into the blue bucket and vice versa
        let r = bb.buckets[0].members.pop().unwrap();
        let b = bb.buckets[1].members.pop().unwrap();
        bb.buckets[0].members.push(b);
        bb.buckets[1].members.push(r);
        let report = bb.check_invariants(&i);
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.contains("wrong color")));
    }

    #[test]
    fn snapshot_export_format() {
        let i = inst("RRB", "2", "2");
        let bb = init_from(&i);
        assert_eq!(bb.export_snapshot(), "SR:R:2 SB:B:1");
    }
}
