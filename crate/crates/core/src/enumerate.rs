//! Bitmask enumeration shared by the exhaustive oracles.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Default largest vertex count the exhaustive routines accept.
pub const DEFAULT_CAP: usize = 28;

/// Hard ceiling imposed by the 64-bit masks.
pub const MAX_CAP: usize = 62;

pub(crate) fn check_cap(n: usize, cap: usize) -> Result<()> {
    if cap > MAX_CAP {
        return Err(Error::param(format!("cap {cap} exceeds the supported {MAX_CAP}")));
    }
    if n > cap {
        return Err(Error::Refused(format!(
            "exhaustive search over n = {n} vertices exceeds the cap of {cap}"
        )));
    }
    Ok(())
}

/// `(mask, size)` for every edge.
pub(crate) fn edge_masks(h: &Hypergraph) -> Vec<(u64, u32)> {
    h.edges()
        .iter()
        .map(|e| (e.iter().fold(0u64, |m, &v| m | 1 << v), e.len() as u32))
        .collect()
}

/// Visits every `n`-bit mask with exactly `n/2` bits set, in increasing
/// numeric order (lexicographic order of the combinations).
pub(crate) fn for_each_balanced<F>(n: usize, mut f: F)
where
    F: FnMut(u64) -> ControlFlow<()>,
{
    debug_assert!(n % 2 == 0 && n <= MAX_CAP);
    let k = n / 2;
    if k == 0 {
        let _ = f(0);
        return;
    }
    let limit = 1u64 << n;
    let mut mask = (1u64 << k) - 1;
    while mask < limit {
        if f(mask).is_break() {
            return;
        }
        // Gosper's hack: next larger integer with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
}

/// χ(e) for the coloring with +1 exactly on `plus`.
#[inline]
pub(crate) fn signed_sum(plus: u64, edge: (u64, u32)) -> i64 {
    2 * (plus & edge.0).count_ones() as i64 - edge.1 as i64
}
