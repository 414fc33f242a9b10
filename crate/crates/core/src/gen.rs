//! Seeded instance generators with controlled stripe structure, plus the
//! exhaustive small-instance enumerator used by brute-force checks.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::cost::Cost;
use crate::instance::{Color, InstanceError, PricedInstance};

/// Requested stripe structure of the true sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    /// Colors shuffled uniformly along the sorted order.
    UniformShuffle,
    /// Strict single-key alternation; requires `|n - m| <= 1`.
    Alternating,
    /// Explicit stripe lengths, interleaved starting with `first`.
    StripeLengths { first: Color, red: Vec<usize>, blue: Vec<usize> },
    /// Two long monochromatic runs (one red, one blue) in the middle of an
    /// otherwise alternating order: the regime where the cheapest proof is
    /// dominated by monochromatic edges.
    FewLongStripes { long_len: usize },
}

/// Full description of a generated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub n_red: usize,
    pub n_blue: usize,
    pub alpha: Cost,
    pub beta: Cost,
    pub pattern: Pattern,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("pattern is inconsistent with the requested counts: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// The color sequence of the true sorted order for a spec, before shuffling
/// ids. Errors when the pattern cannot realize the requested counts.
fn color_sequence(spec: &GenSpec, rng: &mut ChaCha12Rng) -> Result<Vec<Color>, GenError> {
    let (n, m) = (spec.n_red, spec.n_blue);
    match &spec.pattern {
        Pattern::UniformShuffle => {
            let mut seq: Vec<Color> = std::iter::repeat(Color::Red)
                .take(n)
                .chain(std::iter::repeat(Color::Blue).take(m))
                .collect();
            seq.shuffle(rng);
            Ok(seq)
        }
        Pattern::Alternating => {
            if n.abs_diff(m) > 1 {
                return Err(GenError::Inconsistent(format!(
                    "alternation needs |n - m| <= 1, got n={n}, m={m}"
                )));
            }
            let first = if n >= m { Color::Red } else { Color::Blue };
            let mut seq = Vec::with_capacity(n + m);
            let mut color = first;
            for _ in 0..n + m {
                seq.push(color);
                color = color.opposite();
            }
            Ok(seq)
        }
        Pattern::StripeLengths { first, red, blue } => {
            if red.iter().sum::<usize>() != n || blue.iter().sum::<usize>() != m {
                return Err(GenError::Inconsistent(
                    "stripe lengths must sum to the color counts".into(),
                ));
            }
            if red.iter().chain(blue).any(|l| *l == 0) {
                return Err(GenError::Inconsistent("stripe lengths must be positive".into()));
            }
            let (firsts, seconds) =
                if *first == Color::Red { (red, blue) } else { (blue, red) };
            if firsts.len().abs_diff(seconds.len()) > 1
                || seconds.len() > firsts.len()
            {
                return Err(GenError::Inconsistent(format!(
                    "cannot interleave {} and {} stripes starting with {first}",
                    red.len(),
                    blue.len()
                )));
            }
            let mut seq = Vec::with_capacity(n + m);
            let mut color = *first;
            let (mut i, mut j) = (0, 0);
            while i < firsts.len() || j < seconds.len() {
                let len = if color == *first {
                    let l = firsts[i];
                    i += 1;
                    l
                } else {
                    let l = seconds[j];
                    j += 1;
                    l
                };
                seq.extend(std::iter::repeat(color).take(len));
                color = color.opposite();
            }
            Ok(seq)
        }
        Pattern::FewLongStripes { long_len } => {
            let long = *long_len;
            if long == 0 || n < long || m < long {
                return Err(GenError::Inconsistent(format!(
                    "few-long-stripes needs long_len >= 1 within both counts, got long_len={long}, n={n}, m={m}"
                )));
            }
            let (sr, sb) = (n - long, m - long);
            if sr != sb {
                return Err(GenError::Inconsistent(format!(
                    "few-long-stripes needs equally many singletons per color, got {sr} red and {sb} blue"
                )));
            }
            // prefix singletons, then the two long runs, then the rest;
            // the prefix ends blue so the red run stays maximal
            let mut seq = Vec::with_capacity(n + m);
            let prefix_red = sr / 2;
            let prefix_blue = prefix_red;
            for _ in 0..prefix_red {
                seq.push(Color::Red);
                seq.push(Color::Blue);
            }
            seq.extend(std::iter::repeat(Color::Red).take(long));
            seq.extend(std::iter::repeat(Color::Blue).take(long));
            let mut color = Color::Red;
            for _ in 0..(sr - prefix_red) + (sb - prefix_blue) {
                seq.push(color);
                color = color.opposite();
            }
            Ok(seq)
        }
    }
}

/// Deterministically generates an instance realizing the spec's pattern,
/// with key ids shuffled so input order reveals nothing about rank.
pub fn generate(spec: &GenSpec) -> Result<PricedInstance, GenError> {
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let seq = color_sequence(spec, &mut rng)?;
    let n_total = seq.len();
    // id -> rank assignment by shuffling the rank positions
    let mut ranks: Vec<u32> = (0..n_total as u32).collect();
    ranks.shuffle(&mut rng);
    let colored_ranks: Vec<(Color, u32)> =
        ranks.into_iter().map(|r| (seq[r as usize], r)).collect();
    Ok(PricedInstance::new(colored_ranks, spec.alpha, spec.beta)?)
}

/// Largest size [`enumerate_small`] accepts.
pub const ENUMERATE_MAX: usize = 12;

/// Every distinct instance of `n` keys, up to relabeling of key ids: one
/// instance per color sequence of the sorted order (ids are assigned in
/// rank order, which is the canonical labeling). Refuses `n` beyond
/// [`ENUMERATE_MAX`].
pub fn enumerate_small(
    n: usize,
    alpha: Cost,
    beta: Cost,
) -> Result<impl Iterator<Item = PricedInstance>, GenError> {
    if n == 0 || n > ENUMERATE_MAX {
        return Err(GenError::Inconsistent(format!(
            "enumeration is limited to 1..={ENUMERATE_MAX} keys, got {n}"
        )));
    }
    Ok((0u32..1 << n).map(move |mask| {
        let colored_ranks: Vec<(Color, u32)> = (0..n as u32)
            .map(|r| {
                let color = if mask >> r & 1 == 0 { Color::Red } else { Color::Blue };
                (color, r)
            })
            .collect();
        PricedInstance::new(colored_ranks, alpha, beta).expect("enumerated instance is valid")
    }))
}
