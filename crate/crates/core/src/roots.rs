//! Bracketed bisection.

use crate::error::{Error, Result};

/// Returns `true` when `a` and `b` have strictly opposite signs.
pub fn opposite_signs(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Shrinks `[lo, hi]` around a sign change of `f` until `hi - lo <= tol`.
///
/// Returns the final bracket. Stops early if the midpoint no longer splits the
/// interval in floating point, or if `f` is exactly zero at the midpoint.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if !opposite_signs(f_lo, f_hi) {
        if f_lo == 0.0 {
            return Ok((lo, lo));
        }
        if f_hi == 0.0 {
            return Ok((hi, hi));
        }
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok((mid, mid));
        }
        if opposite_signs(f_lo, f_mid) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok((lo, hi))
}
