//! Small numerical helpers.

use crate::error::{Error, Result};

/// Bisection root search on `[lo, hi]`.
///
/// Requires a sign change over the bracket and narrows it until its width
/// drops below `tol`, so the returned midpoint is within `tol` of a root.
/// An exact zero of `f` ends the search immediately.
pub fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, max_iter: usize, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 || hi - lo < tol {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
