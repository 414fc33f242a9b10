//! Comparison-driven sorting and searching helpers shared across the crate.
//!
//! All functions take a comparison closure rather than an oracle so they can
//! be driven by either the bichromatic or multichromatic oracle and counted
//! by tests.

use crate::instance::KeyId;
use crate::oracle::Outcome;

/// Bottom-up merge sort using at most `k * ceil(log2 k)` comparisons.
pub fn merge_sort_by(keys: &[KeyId], cmp: &mut impl FnMut(KeyId, KeyId) -> Outcome) -> Vec<KeyId> {
    let mut cur: Vec<KeyId> = keys.to_vec();
    if cur.len() < 2 {
        return cur;
    }
    let mut buf: Vec<KeyId> = Vec::with_capacity(cur.len());
    let mut width = 1;
    while width < cur.len() {
        buf.clear();
        let mut start = 0;
        while start < cur.len() {
            let mid = (start + width).min(cur.len());
            let end = (start + 2 * width).min(cur.len());
            let (mut i, mut j) = (start, mid);
            while i < mid && j < end {
                if cmp(cur[i], cur[j]) == Outcome::Less {
                    buf.push(cur[i]);
                    i += 1;
                } else {
                    buf.push(cur[j]);
                    j += 1;
                }
            }
            buf.extend_from_slice(&cur[i..mid]);
            buf.extend_from_slice(&cur[j..end]);
            start = end;
        }
        std::mem::swap(&mut cur, &mut buf);
        width *= 2;
    }
    cur
}

/// Largest (or smallest) element of a slice by a sequential scan of
/// `len - 1` comparisons.
pub fn tournament_extreme(
    keys: &[KeyId],
    want_max: bool,
    cmp: &mut impl FnMut(KeyId, KeyId) -> Outcome,
) -> Option<KeyId> {
    let mut it = keys.iter().copied();
    let mut champ = it.next()?;
    for k in it {
        let champ_less = cmp(champ, k) == Outcome::Less;
        if champ_less == want_max {
            champ = k;
        }
    }
    Some(champ)
}

/// Number of leading elements of `sorted[from..]` for which `pred` holds,
/// found by doubling steps followed by a binary refinement. `pred` must be
/// monotone (true prefix, false suffix) on that range.
///
/// Uses at most `2 * (floor(log2(k + 1)) + 1)` predicate calls where `k` is
/// the returned count.
pub fn gallop(
    sorted_len: usize,
    from: usize,
    mut pred: impl FnMut(usize) -> bool,
) -> usize {
    let len = sorted_len - from;
    if len == 0 || !pred(from) {
        return 0;
    }
    // Invariant: everything at from..from+lo satisfies pred.
    let mut lo = 1;
    let mut step = 1;
    while lo + step <= len {
        if pred(from + lo + step - 1) {
            lo += step;
            step *= 2;
        } else {
            break;
        }
    }
    // Binary refine inside (lo, lo + step).
    let mut hi = (lo + step).min(len + 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if pred(from + mid - 1) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Index in `sorted` where `probe` belongs, via binary search: returns the
/// count of elements smaller than `probe`. Charges `ceil(log2(len + 1))`
/// comparisons.
pub fn binary_search_position(
    sorted: &[KeyId],
    probe: KeyId,
    cmp: &mut impl FnMut(KeyId, KeyId) -> Outcome,
) -> usize {
    let mut lo = 0;
    let mut hi = sorted.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if cmp(sorted[mid], probe) == Outcome::Less {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}
