//! Problem instances: colored keys with a hidden total order and two
//! monochromatic prices. The bichromatic price is normalized to 1.
//!
//! The true rank of a key is deliberately private to this module: algorithm
//! code can only learn about the order through a charging
//! [`ComparisonOracle`](crate::oracle::ComparisonOracle). Ground-truth
//! helpers live in [`crate::instrument`] and are meant for generators,
//! verifiers, and tests only.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cost::Cost;

/// Key color. Red-red comparisons cost `alpha`, blue-blue cost `beta`,
/// red-blue cost 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Index of a key in an instance, or one of the two reserved sentinel ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyId(pub u32);

/// Artificial smallest red element; comparisons against it are free.
pub const RED_SENTINEL: KeyId = KeyId(u32::MAX - 1);
/// Artificial largest blue element; comparisons against it are free.
pub const BLUE_SENTINEL: KeyId = KeyId(u32::MAX);

impl KeyId {
    pub fn is_sentinel(self) -> bool {
        self == RED_SENTINEL || self == BLUE_SENTINEL
    }
}

impl fmt::Display for KeyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RED_SENTINEL => write!(f, "SR"),
            BLUE_SENTINEL => write!(f, "SB"),
            KeyId(v) => write!(f, "{v}"),
        }
    }
}

/// One key of an instance. `rank` is the hidden position in the true sorted
/// order and is only readable inside this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColoredKey {
    pub id: KeyId,
    pub color: Color,
    pub(crate) rank: u32,
}

/// A full bichromatic instance: keys, hidden ranks, and the two prices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricedInstance {
    keys: Vec<ColoredKey>,
    alpha: Cost,
    beta: Cost,
    n_red: usize,
    n_blue: usize,
}

/// Validation failure when assembling or parsing an instance.
#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("instance must contain at least one key")]
    Empty,
    #[error("instance too large: {0} keys")]
    TooLarge(usize),
    #[error("rank {0} out of range or duplicated")]
    BadRank(u32),
    #[error("price must be non-negative and finite or `inf`: {0}")]
    BadPrice(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl PricedInstance {
    /// Build from `(color, rank)` pairs in id order. Ranks must form a
    /// permutation of `0..N`.
    pub fn new(
        colored_ranks: Vec<(Color, u32)>,
        alpha: Cost,
        beta: Cost,
    ) -> Result<PricedInstance, InstanceError> {
        let n = colored_ranks.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if n >= (u32::MAX - 2) as usize {
            return Err(InstanceError::TooLarge(n));
        }
        let mut seen = vec![false; n];
        let mut keys = Vec::with_capacity(n);
        let mut n_red = 0;
        for (i, (color, rank)) in colored_ranks.into_iter().enumerate() {
            if rank as usize >= n || seen[rank as usize] {
                return Err(InstanceError::BadRank(rank));
            }
            seen[rank as usize] = true;
            if color == Color::Red {
                n_red += 1;
            }
            keys.push(ColoredKey { id: KeyId(i as u32), color, rank });
        }
        Ok(PricedInstance { keys, alpha, beta, n_red, n_blue: n - n_red })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Number of red keys.
    pub fn n_red(&self) -> usize {
        self.n_red
    }

    /// Number of blue keys.
    pub fn n_blue(&self) -> usize {
        self.n_blue
    }

    pub fn alpha(&self) -> Cost {
        self.alpha
    }

    pub fn beta(&self) -> Cost {
        self.beta
    }

    pub fn color(&self, id: KeyId) -> Option<Color> {
        match id {
            RED_SENTINEL => Some(Color::Red),
            BLUE_SENTINEL => Some(Color::Blue),
            KeyId(i) => self.keys.get(i as usize).map(|k| k.color),
        }
    }

    pub fn keys(&self) -> &[ColoredKey] {
        &self.keys
    }

    /// Ids of one color, in id order.
    pub fn ids_of(&self, color: Color) -> Vec<KeyId> {
        self.keys.iter().filter(|k| k.color == color).map(|k| k.id).collect()
    }

    pub(crate) fn rank(&self, id: KeyId) -> Option<u32> {
        match id {
            KeyId(i) if !id.is_sentinel() => self.keys.get(i as usize).map(|k| k.rank),
            _ => None,
        }
    }

    /// Hidden rank extended to sentinels, for intra-crate instrumentation.
    pub(crate) fn rank_ext(&self, id: KeyId) -> i64 {
        match id {
            RED_SENTINEL => i64::MIN,
            BLUE_SENTINEL => i64::MAX,
            KeyId(i) => self.keys[i as usize].rank as i64,
        }
    }

    /// Serialize in the line-based text format:
    /// `N alpha beta` then one `color rank` line per key, in id order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} {} {}\n",
            self.len(),
            self.alpha.display_decimal(),
            self.beta.display_decimal()
        ));
        for k in &self.keys {
            out.push_str(&format!("{} {}\n", k.color.letter(), k.rank));
        }
        out
    }
}

impl FromStr for PricedInstance {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (lno, header) = lines.next().ok_or(InstanceError::Empty)?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(InstanceError::Parse {
                line: lno + 1,
                msg: format!("expected `N alpha beta`, got `{header}`"),
            });
        }
        let n: usize = parts[0].parse().map_err(|_| InstanceError::Parse {
            line: lno + 1,
            msg: format!("bad key count `{}`", parts[0]),
        })?;
        let alpha: Cost = parts[1]
            .parse()
            .map_err(|_| InstanceError::BadPrice(parts[1].to_string()))?;
        let beta: Cost = parts[2]
            .parse()
            .map_err(|_| InstanceError::BadPrice(parts[2].to_string()))?;
        let mut colored_ranks = Vec::with_capacity(n);
        for _ in 0..n {
            let (lno, line) = lines.next().ok_or(InstanceError::Parse {
                line: 0,
                msg: format!("expected {n} key lines"),
            })?;
            let mut it = line.split_whitespace();
            let color = match it.next() {
                Some("R") => Color::Red,
                Some("B") => Color::Blue,
                other => {
                    return Err(InstanceError::Parse {
                        line: lno + 1,
                        msg: format!("bad color `{}`", other.unwrap_or("")),
                    })
                }
            };
            let rank: u32 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or(InstanceError::Parse { line: lno + 1, msg: "bad rank".into() })?;
            colored_ranks.push((color, rank));
        }
        PricedInstance::new(colored_ranks, alpha, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(colors: &str, alpha: &str, beta: &str) -> PricedInstance {
        // colors in rank order, ids assigned in that same order
        let pairs = colors
            .chars()
            .enumerate()
            .map(|(r, c)| {
                (if c == 'R' { Color::Red } else { Color::Blue }, r as u32)
            })
            .collect();
        PricedInstance::new(pairs, alpha.parse().unwrap(), beta.parse().unwrap()).unwrap()
    }

    #[test]
    fn counts_and_colors() {
        let i = inst("RRBBR", "3", "5");
        assert_eq!(i.len(), 5);
        assert_eq!(i.n_red(), 3);
        assert_eq!(i.n_blue(), 2);
        assert_eq!(i.color(KeyId(2)), Some(Color::Blue));
        assert_eq!(i.color(RED_SENTINEL), Some(Color::Red));
        assert_eq!(i.color(KeyId(99)), None);
    }

    #[test]
    fn duplicate_rank_rejected() {
        let e = PricedInstance::new(
            vec![(Color::Red, 0), (Color::Blue, 0)],
            Cost::from_int(2),
            Cost::from_int(2),
        );
        assert!(matches!(e, Err(InstanceError::BadRank(0))));
        let e = PricedInstance::new(
            vec![(Color::Red, 0), (Color::Blue, 2)],
            Cost::from_int(2),
            Cost::from_int(2),
        );
        assert!(matches!(e, Err(InstanceError::BadRank(2))));
    }

    #[test]
    fn text_round_trip() {
        let i = inst("RBRB", "2.5", "inf");
        let text = i.to_text();
        let back: PricedInstance = text.parse().unwrap();
        assert_eq!(back, i);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_rejects_duplicate_ranks() {
        let bad = "2 2 2\nR 1\nB 1\n";
        assert!(bad.parse::<PricedInstance>().is_err());
    }
}
