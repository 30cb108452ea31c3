use crate::error::Result;

/// Final bracket of a bisection: `pred(lo)` is false, `pred(hi)` is true.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub iterations: u32,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Shrinks `[lo, hi]` around the switch point of a monotone predicate
/// (false below, true above) until the width is at most `tol`.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, tol: f64, mut pred: impl FnMut(f64) -> Result<bool>) -> Result<Bracket> {
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(Bracket { lo, hi, iterations })
}

/// Widens `[lo, hi]` by doubling until `pred(lo)` is false and `pred(hi)` is
/// true, within `[floor, ceil]`. Returns `None` if a limit is hit first.
pub(crate) fn expand(
    mut lo: f64,
    mut hi: f64,
    floor: f64,
    ceil: f64,
    mut pred: impl FnMut(f64) -> Result<bool>,
) -> Result<Option<(f64, f64)>> {
    while !pred(hi)? {
        if hi >= ceil {
            return Ok(None);
        }
        lo = hi;
        hi = (hi + hi.abs().max(1.0)).min(ceil);
    }
    while pred(lo)? {
        if lo <= floor {
            return Ok(None);
        }
        hi = lo;
        lo = (lo - lo.abs().max(1.0)).max(floor);
    }
    Ok(Some((lo, hi)))
}
