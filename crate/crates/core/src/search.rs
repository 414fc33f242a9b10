//! One round of inversion probing per subproblem: cost-balanced sampling,
//! the four bichromatic tests, certificate selection and execution, and the
//! randomness fix-up applied before a found inversion is inserted.
//!
//! Probes draw uniformly from the bucket members; an inversion found through
//! a sample extreme is repaired so that, conditioned on the kept endpoint,
//! the partner is uniform over its feasible side. Certificates surface
//! inversions together with the already-compared partner pool, so their
//! fix-up redraw is free.

use rand::Rng;

use crate::backbone::{Backbone, BackboneError, SubState};
use crate::cost::Cost;
use crate::instance::{Color, KeyId};
use crate::oracle::{ComparisonOracle, Outcome};

/// The four proof shapes that no inversion exists between two buckets with
/// `A` red and `B` blue members.
///
/// The tournament kinds are named for the red-below-blue orientation; when
/// the red bucket sits on the upper side, the same proof finds the red
/// minimum instead of the maximum at identical cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    /// All `A * B` bichromatic comparisons.
    AllPairs,
    /// `A - 1` red-red comparisons to the red extreme, then `B` bichromatic.
    MaxRedThenBlue,
    /// `B - 1` blue-blue comparisons to the blue extreme, then `A` bichromatic.
    MinBlueThenRed,
    /// Both tournaments plus one bichromatic comparison.
    BothExtremes,
}

/// The cheapest certificate for given bucket sizes and prices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateChoice {
    pub kind: CertificateKind,
    pub cost: Cost,
    pub red_count: u64,
    pub blue_count: u64,
}

/// Minimum over the four proof costs. Tournament proofs require their color
/// to be present (an extreme must exist); ties break toward the lowest kind.
pub fn certificate_cost(a: u64, b: u64, alpha: Cost, beta: Cost) -> CertificateChoice {
    let all_pairs = Cost::Finite(crate::cost::Rat::from_integer(a as i128 * b as i128));
    let mut best = CertificateChoice {
        kind: CertificateKind::AllPairs,
        cost: all_pairs,
        red_count: a,
        blue_count: b,
    };
    let mut consider = |kind: CertificateKind, cost: Cost| {
        if cost < best.cost {
            best.kind = kind;
            best.cost = cost;
        }
    };
    if a >= 1 {
        consider(CertificateKind::MaxRedThenBlue, alpha.mul_count(a - 1) + Cost::from_int(b));
    }
    if b >= 1 {
        consider(CertificateKind::MinBlueThenRed, beta.mul_count(b - 1) + Cost::from_int(a));
    }
    if a >= 1 && b >= 1 {
        consider(
            CertificateKind::BothExtremes,
            alpha.mul_count(a - 1) + beta.mul_count(b - 1) + Cost::ONE,
        );
    }
    best
}

/// Which endpoint of a raw inversion is kept through canonicalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// Keep `x`, the left-bucket endpoint; redraw the right partner.
    LeftEndpoint,
    /// Keep `y`, the right-bucket endpoint; redraw the left partner.
    RightEndpoint,
}

/// How the partner of the kept endpoint is redrawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Redraw {
    /// Both endpoints were uniform draws; nothing to repair.
    None,
    /// The partner pool is already known from performed comparisons;
    /// redrawing charges nothing.
    KnownPool { keep: Keep, pool: Vec<KeyId> },
    /// The kept endpoint must first split the opposite bucket with one
    /// charged bichromatic comparison per member.
    Partition { keep: Keep },
}

/// A proved inversion awaiting canonicalization: `y < x` with `y` in the
/// right bucket and `x` in the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInversion {
    pub y: KeyId,
    pub x: KeyId,
    pub redraw: Redraw,
}

/// Result of one probe round on a subproblem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    NoInversion,
    Inversion(RawInversion),
    CertificateComplete,
}

/// Grows each active bucket's sampling credit by one round and spends it on
/// uniformly drawn samples, updating the sample extremes with one or two
/// charged monochromatic comparisons each. Buckets with an infinite price
/// never sample; exhausted buckets are skipped.
pub fn replenish_samples(backbone: &mut Backbone, oracle: &mut ComparisonOracle, rng: &mut impl Rng) {
    for pos in backbone.active_bucket_positions() {
        replenish_bucket(backbone, pos, oracle, rng);
    }
}

pub(crate) fn replenish_bucket(
    backbone: &mut Backbone,
    pos: usize,
    oracle: &mut ComparisonOracle,
    rng: &mut impl Rng,
) {
    let price = oracle.mono_price(backbone.bucket(pos).color());
    let bucket = backbone.bucket_mut(pos);
    bucket.credit += crate::cost::Rat::from_integer(1);
    let Cost::Finite(price) = price else {
        return;
    };
    while bucket.credit >= price && bucket.sampled_len < bucket.members.len() {
        bucket.credit -= price;
        let idx = rng.random_range(bucket.sampled_len..bucket.members.len());
        bucket.members.swap(bucket.sampled_len, idx);
        let new = bucket.members[bucket.sampled_len];
        bucket.sampled_len += 1;
        if bucket.sample_max == bucket.sample_min {
            // singleton sample: one comparison settles both extremes
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

/// One probe on the subproblem at `boundary`: uniform draws from both
/// buckets, then the bichromatic tests in order, stopping at the first
/// success. A success proves a right-bucket element below a left-bucket
/// element. With an empty side no member pair exists, so the probe reports
/// `NoInversion` without charging.
pub fn round_probe(
    backbone: &mut Backbone,
    boundary: usize,
    oracle: &mut ComparisonOracle,
    rng: &mut impl Rng,
    extra_cross_probe: bool,
) -> ProbeOutcome {
    let snap = oracle.ledger().counts_snapshot();
    let outcome = probe_tests(backbone, boundary, oracle, rng, extra_cross_probe);
    let spent = oracle.ledger().cost_since(snap);
    let sub = backbone.sub_mut(boundary);
    sub.accumulated_cost += spent;
    outcome
}

fn probe_tests(
    backbone: &Backbone,
    boundary: usize,
    oracle: &mut ComparisonOracle,
    rng: &mut impl Rng,
    extra_cross_probe: bool,
) -> ProbeOutcome {
    let left = backbone.bucket(boundary);
    let right = backbone.bucket(boundary + 1);
    if left.is_empty() || right.is_empty() {
        return ProbeOutcome::NoInversion;
    }
    let x_s = left.members()[rng.random_range(0..left.len())];
    let x_q = right.members()[rng.random_range(0..right.len())];

    // (1) the two uniform draws
    if oracle.cmp(x_s, x_q) == Outcome::Greater {
        return ProbeOutcome::Inversion(RawInversion { y: x_q, x: x_s, redraw: Redraw::None });
    }
    // (2) uniform left draw against the right sample minimum
    if oracle.cmp(x_s, right.sample_min()) == Outcome::Greater {
        return ProbeOutcome::Inversion(RawInversion {
            y: right.sample_min(),
            x: x_s,
            redraw: Redraw::Partition { keep: Keep::LeftEndpoint },
        });
    }
    // (3) the left sample maximum against the uniform right draw
    if oracle.cmp(left.sample_max(), x_q) == Outcome::Greater {
        return ProbeOutcome::Inversion(RawInversion {
            y: x_q,
            x: left.sample_max(),
            redraw: Redraw::Partition { keep: Keep::RightEndpoint },
        });
    }
    // (4) both sample extremes
    if oracle.cmp(left.sample_max(), right.sample_min()) == Outcome::Greater {
        return ProbeOutcome::Inversion(RawInversion {
            y: right.sample_min(),
            x: left.sample_max(),
            redraw: Redraw::Partition { keep: Keep::RightEndpoint },
        });
    }
    if extra_cross_probe {
        // prose variant: fresh draws against the opposite sample extremes
        let x_s2 = left.members()[rng.random_range(0..left.len())];
        if oracle.cmp(x_s2, right.sample_min()) == Outcome::Greater {
            return ProbeOutcome::Inversion(RawInversion {
                y: right.sample_min(),
                x: x_s2,
                redraw: Redraw::Partition { keep: Keep::LeftEndpoint },
            });
        }
        let x_q2 = right.members()[rng.random_range(0..right.len())];
        if oracle.cmp(left.sample_max(), x_q2) == Outcome::Greater {
            return ProbeOutcome::Inversion(RawInversion {
                y: x_q2,
                x: left.sample_max(),
                redraw: Redraw::Partition { keep: Keep::RightEndpoint },
            });
        }
    }
    ProbeOutcome::NoInversion
}

/// Repairs the randomness of a raw inversion and returns the final
/// `(y, x)` pair, `y < x`, both proved by charged comparisons.
///
/// When a sample extreme was involved, the kept endpoint `e` splits the
/// opposite bucket by comparing every member against `e`; the partner is
/// then drawn uniformly from the far side, which contains the old extreme
/// and is therefore never empty. Certificate-found inversions arrive with
/// their partner pool precomputed and redraw for free.
pub fn canonicalize_inversion(
    backbone: &Backbone,
    boundary: usize,
    raw: RawInversion,
    oracle: &mut ComparisonOracle,
    rng: &mut impl Rng,
) -> Result<(KeyId, KeyId), BackboneError> {
    let draw = |pool: &[KeyId], rng: &mut dyn rand::RngCore| -> Result<KeyId, BackboneError> {
        if pool.is_empty() {
            return Err(BackboneError::Internal(
                "canonicalization pool is empty; the old extreme should guarantee a partner".into(),
            ));
        }
        let idx = rng.random_range(0..pool.len());
        Ok(pool[idx])
    };
    match raw.redraw {
        Redraw::None => Ok((raw.y, raw.x)),
        Redraw::KnownPool { keep: Keep::LeftEndpoint, pool } => {
            Ok((draw(&pool, rng)?, raw.x))
        }
        Redraw::KnownPool { keep: Keep::RightEndpoint, pool } => {
            Ok((raw.y, draw(&pool, rng)?))
        }
        Redraw::Partition { keep: Keep::LeftEndpoint } => {
            // keep x; split the right bucket around it, partner below
            let e = raw.x;
            let pool: Vec<KeyId> = backbone
                .bucket(boundary + 1)
                .members()
                .iter()
                .copied()
                .filter(|&m| oracle.cmp(m, e) == Outcome::Less)
                .collect();
            Ok((draw(&pool, rng)?, e))
        }
        Redraw::Partition { keep: Keep::RightEndpoint } => {
            // keep y; split the left bucket around it, partner above
            let e = raw.y;
            let pool: Vec<KeyId> = backbone
                .bucket(boundary)
                .members()
                .iter()
                .copied()
                .filter(|&m| oracle.cmp(m, e) == Outcome::Greater)
                .collect();
            Ok((e, draw(&pool, rng)?))
        }
    }
}

/// Which bucket a tournament runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Executes the chosen proof's comparisons in a fixed order. When no
/// inversion surfaces the subproblem becomes finished and the outcome is
/// `CertificateComplete`; otherwise one inversion is returned, picked so
/// that its partner redraw is uniform over a feasible side that was fully
/// compared (or, for the two-extremes proof, repaired later by a charged
/// partition).
///
/// `skip_last` drops the proof's final comparison; it exists so verification
/// tooling can demonstrate that an unsound certificate is caught.
pub fn run_certificate(
    backbone: &mut Backbone,
    boundary: usize,
    choice: &CertificateChoice,
    oracle: &mut ComparisonOracle,
    skip_last: bool,
) -> ProbeOutcome {
    let snap = oracle.ledger().counts_snapshot();
    let outcome = match execute_certificate(backbone, boundary, choice, oracle, skip_last) {
        None => ProbeOutcome::CertificateComplete,
        Some(raw) => ProbeOutcome::Inversion(raw),
    };
    let spent = oracle.ledger().cost_since(snap);
    let sub = backbone.sub_mut(boundary);
    sub.accumulated_cost += spent;
    if outcome == ProbeOutcome::CertificateComplete {
        sub.state = SubState::Finished;
    }
    outcome
}

fn execute_certificate(
    backbone: &Backbone,
    boundary: usize,
    choice: &CertificateChoice,
    oracle: &mut ComparisonOracle,
    skip_last: bool,
) -> Option<RawInversion> {
    let left = backbone.bucket(boundary);
    let right = backbone.bucket(boundary + 1);
    let red_side = if left.color() == Color::Red { Side::Left } else { Side::Right };
    match choice.kind {
        CertificateKind::AllPairs => {
            let a = left.len();
            let b = right.len();
            let total = a * b;
            let mut inverted = vec![false; total];
            let mut done = 0;
            'outer: for (i, &x) in left.members().iter().enumerate() {
                for (j, &y) in right.members().iter().enumerate() {
                    if skip_last && done + 1 == total {
                        break 'outer;
                    }
                    inverted[i * b + j] = oracle.cmp(y, x) == Outcome::Less;
                    done += 1;
                }
            }
            let (i0, j0) = (0..a)
                .flat_map(|i| (0..b).map(move |j| (i, j)))
                .find(|(i, j)| inverted[i * b + j])?;
            let y = right.members()[j0];
            let pool: Vec<KeyId> = left
                .members()
                .iter()
                .enumerate()
                .filter(|(i, _)| inverted[i * b + j0])
                .map(|(_, &x)| x)
                .collect();
            Some(RawInversion {
                y,
                x: left.members()[i0],
                redraw: Redraw::KnownPool { keep: Keep::RightEndpoint, pool },
            })
        }
        CertificateKind::MaxRedThenBlue | CertificateKind::MinBlueThenRed => {
            let tournament_color =
                if choice.kind == CertificateKind::MaxRedThenBlue { Color::Red } else { Color::Blue };
            let side = if (red_side == Side::Left) == (tournament_color == Color::Red) {
                Side::Left
            } else {
                Side::Right
            };
            tournament_certificate(left, right, side, oracle, skip_last)
        }
        CertificateKind::BothExtremes => {
            let max_left =
                crate::sortutil::tournament_extreme(left.members(), true, &mut |a, b| {
                    oracle.cmp(a, b)
                })
                .expect("BothExtremes requires members on both sides");
            let min_right =
                crate::sortutil::tournament_extreme(right.members(), false, &mut |a, b| {
                    oracle.cmp(a, b)
                })
                .expect("BothExtremes requires members on both sides");
            if skip_last {
                return None;
            }
            if oracle.cmp(min_right, max_left) == Outcome::Less {
                Some(RawInversion {
                    y: min_right,
                    x: max_left,
                    redraw: Redraw::Partition { keep: Keep::RightEndpoint },
                })
            } else {
                None
            }
        }
    }
}


/// Tournament on one bucket, then cross comparisons with every member of
/// the other. The tournament extreme is the one facing the opposite bucket:
/// the maximum on the left side, the minimum on the right.
fn tournament_certificate(
    left: &crate::backbone::Bucket,
    right: &crate::backbone::Bucket,
    side: Side,
    oracle: &mut ComparisonOracle,
    skip_last: bool,
) -> Option<RawInversion> {
    let mut cmp = |a: KeyId, b: KeyId| oracle.cmp(a, b);
    match side {
        Side::Left => {
            let extreme = crate::sortutil::tournament_extreme(left.members(), true, &mut cmp)
                .expect("tournament side has members");
            let mut pool = Vec::new();
            let limit = right.len().saturating_sub(usize::from(skip_last));
            for &y in &right.members()[..limit] {
                if oracle.cmp(y, extreme) == Outcome::Less {
                    pool.push(y);
                }
            }
            let y0 = pool.first().copied()?;
            Some(RawInversion {
                y: y0,
                x: extreme,
                redraw: Redraw::KnownPool { keep: Keep::LeftEndpoint, pool },
            })
        }
        Side::Right => {
            let extreme = crate::sortutil::tournament_extreme(right.members(), false, &mut cmp)
                .expect("tournament side has members");
            let mut pool = Vec::new();
            let limit = left.len().saturating_sub(usize::from(skip_last));
            for &x in &left.members()[..limit] {
                if oracle.cmp(x, extreme) == Outcome::Greater {
                    pool.push(x);
                }
            }
            let x0 = pool.first().copied()?;
            Some(RawInversion {
                y: extreme,
                x: x0,
                redraw: Redraw::KnownPool { keep: Keep::RightEndpoint, pool },
            })
        }
    }
}
