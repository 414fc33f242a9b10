//! Exact cost arithmetic: non-negative rationals extended with infinity.
//!
//! Every charged total in this crate is computed with exact rational
//! arithmetic so that ledger identities can be asserted with `==` rather
//! than a float tolerance. Infinity follows the pricing convention that a
//! forbidden comparison never performed contributes nothing: `inf * 0 == 0`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used for all cost bookkeeping.
pub type Rat = Ratio<i128>;

/// A comparison price or accumulated cost: a non-negative rational or `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cost {
    Finite(Rat),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(Rat::new_raw(0, 1));
    pub const ONE: Cost = Cost::Finite(Rat::new_raw(1, 1));

    pub fn from_int(v: u64) -> Cost {
        Cost::Finite(Rat::from_integer(v as i128))
    }

    pub fn ratio(num: i128, den: i128) -> Cost {
        Cost::Finite(Rat::new(num, den))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cost::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Cost::Finite(r) if r.is_zero())
    }

    pub fn as_finite(&self) -> Option<Rat> {
        match self {
            Cost::Finite(r) => Some(*r),
            Cost::Infinite => None,
        }
    }

    /// Price times a comparison count, with `inf * 0 == 0`: a proof that
    /// performs zero comparisons of a forbidden kind is still free.
    pub fn mul_count(&self, count: u64) -> Cost {
        match self {
            Cost::Finite(r) => Cost::Finite(r * Rat::from_integer(count as i128)),
            Cost::Infinite if count == 0 => Cost::ZERO,
            Cost::Infinite => Cost::Infinite,
        }
    }

    /// Exact division; `None` when the divisor is zero or either side is `inf`.
    pub fn div(&self, other: &Cost) -> Option<Cost> {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) if !b.is_zero() => Some(Cost::Finite(a / b)),
            _ => None,
        }
    }

    /// Decimal rendering: exact when the denominator divides 10^6, otherwise
    /// rounded half-up to six decimal places. `inf` prints as `inf`.
    pub fn display_decimal(&self) -> String {
        match self {
            Cost::Infinite => "inf".to_string(),
            Cost::Finite(r) => format_rat_decimal(*r),
        }
    }
}

fn format_rat_decimal(r: Rat) -> String {
    const SCALE: i128 = 1_000_000;
    let neg = r.is_negative();
    let r = if neg { -r } else { r };
    let scaled_num = r.numer() * SCALE;
    let den = *r.denom();
    // round half-up on the 1e-6 grid
    let units = (scaled_num + den / 2) / den;
    let int_part = units / SCALE;
    let frac_part = units % SCALE;
    let sign = if neg { "-" } else { "" };
    if frac_part == 0 {
        return format!("{sign}{int_part}");
    }
    let mut frac = format!("{frac_part:06}");
    while frac.ends_with('0') {
        frac.pop();
    }
    format!("{sign}{int_part}.{frac}")
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        *self = *self + rhs;
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_decimal())
    }
}

/// `total / hamiltonian` with conventions for the degenerate cases: a free
/// run over a free proof is perfectly competitive (1), anything costly over
/// a free proof is infinitely uncompetitive.
pub fn competitive_ratio(total: Cost, hamiltonian: Cost) -> Cost {
    if let Some(r) = total.div(&hamiltonian) {
        return r;
    }
    match (total, hamiltonian) {
        (t, h) if h.is_zero() => {
            if t.is_zero() {
                Cost::ONE
            } else {
                Cost::Infinite
            }
        }
        (Cost::Infinite, Cost::Infinite) => Cost::ONE,
        (_, Cost::Infinite) => Cost::ZERO,
        (Cost::Infinite, _) => Cost::Infinite,
        _ => unreachable!("div only fails on zero or infinite operands"),
    }
}

/// Error from parsing a price token.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PriceParseError {
    #[error("invalid price literal `{0}`")]
    Invalid(String),
    #[error("price `{0}` is negative")]
    Negative(String),
}

impl FromStr for Cost {
    type Err = PriceParseError;

    /// Accepts `inf`, integers, and plain decimals such as `2.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Cost::Infinite);
        }
        let bad = || PriceParseError::Invalid(t.to_string());
        let (int_str, frac_str) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if int_str.is_empty() && frac_str.is_empty() {
            return Err(bad());
        }
        let int_part: i128 = if int_str.is_empty() {
            0
        } else {
            int_str.parse().map_err(|_| bad())?
        };
        if int_part < 0 || int_str.starts_with('-') {
            return Err(PriceParseError::Negative(t.to_string()));
        }
        let mut num = int_part;
        let mut den: i128 = 1;
        if !frac_str.is_empty() {
            if frac_str.len() > 18 || !frac_str.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let frac: i128 = frac_str.parse().map_err(|_| bad())?;
            den = 10i128.pow(frac_str.len() as u32);
            num = num * den + frac;
        }
        Ok(Cost::Finite(Rat::new(num, den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for (s, out) in [("2", "2"), ("2.5", "2.5"), ("0.125", "0.125"), ("inf", "inf")] {
            let c: Cost = s.parse().unwrap();
            assert_eq!(c.display_decimal(), out);
        }
        assert_eq!("10.00".parse::<Cost>().unwrap(), Cost::from_int(10));
        assert!("-1".parse::<Cost>().is_err());
        assert!("abc".parse::<Cost>().is_err());
        assert!("".parse::<Cost>().is_err());
    }

    #[test]
    fn infinity_arithmetic() {
        assert_eq!(Cost::Infinite.mul_count(0), Cost::ZERO);
        assert_eq!(Cost::Infinite.mul_count(3), Cost::Infinite);
        assert_eq!(Cost::Infinite + Cost::from_int(5), Cost::Infinite);
        assert!(Cost::from_int(1_000_000) < Cost::Infinite);
        assert_eq!(Cost::Infinite.cmp(&Cost::Infinite), Ordering::Equal);
    }

    #[test]
    fn rounding_is_half_up_at_six_places() {
        let third = Cost::ratio(1, 3);
        assert_eq!(third.display_decimal(), "0.333333");
        let two_thirds = Cost::ratio(2, 3);
        assert_eq!(two_thirds.display_decimal(), "0.666667");
    }
}
