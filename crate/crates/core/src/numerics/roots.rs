//! Bracketed root refinement.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 200;

/// Refines a sign change of `f` inside `[lo, hi]` by bisection.
///
/// Stops when the bracket is narrower than `tol` or `f` vanishes exactly.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bracket [{lo}, {hi}] and tolerance {tol} must be finite and positive"
        )));
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidBracket {
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
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
