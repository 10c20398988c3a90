//! Bracketed root finding for monotone increasing functions.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Widens `[lo, hi]` symmetrically about its centre, doubling the half-width
/// up to `max_doublings` times, until `f(lo) ≤ target ≤ f(hi)`.
pub fn expand_bracket<T, F>(
    f: &mut F,
    target: T,
    mut lo: T,
    mut hi: T,
    max_doublings: usize,
) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> T + ?Sized,
{
    let two = T::lit(2.0);
    for _ in 0..=max_doublings {
        let (f_lo, f_hi) = (f(lo), f(hi));
        if f_lo <= target && target <= f_hi {
            return Ok((lo, hi));
        }
        let centre = (lo + hi) / two;
        let half = (hi - lo) / two;
        if !(half.is_finite() && half > T::zero()) {
            break;
        }
        lo = centre - two * half;
        hi = centre + two * half;
    }
    Err(Error::Numerical(format!(
        "could not bracket target {target} after {max_doublings} doublings; last bracket [{lo}, {hi}] \
         maps to [{}, {}]",
        f(lo),
        f(hi)
    )))
}

/// Bisection on an increasing `f` for `f(x) = target` within a bracket
/// `f(lo) ≤ target ≤ f(hi)`. Stops when the bracket is narrower than
/// `x_tol` or cannot shrink further in `T`.
pub fn bisect_increasing<T, F>(f: &mut F, target: T, mut lo: T, mut hi: T, x_tol: T) -> T
where
    T: Real,
    F: FnMut(T) -> T + ?Sized,
{
    let half = T::lit(0.5);
    for _ in 0..2000 {
        if hi - lo <= x_tol {
            break;
        }
        let mid = lo + half * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == target {
            return mid;
        }
        if fm < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + half * (hi - lo)
}
