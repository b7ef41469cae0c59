//! Convexity test and the tail convexification `Φ_T`.

use alloc::vec::Vec;

use super::GrowthFunction;
use crate::real;
use crate::{Error, Result};

const CONVEXITY_RTOL: f64 = 1e-10;

fn sample_ladder() -> Vec<f64> {
    let mut t = Vec::with_capacity(82);
    t.push(0.0);
    for k in -40..=40 {
        t.push(real::powf(2.0, k as f64 / 4.0));
    }
    t
}

/// Midpoint convexity on every pair of a geometric ladder in
/// `[2^{−10}, 2^{10}]` plus `t = 0`; pairs with a non-finite value are skipped.
pub fn convexity_test(phi: &GrowthFunction) -> bool {
    let ts = sample_ladder();
    let vs: Vec<f64> = ts.iter().map(|t| phi.eval(*t)).collect();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let (a, b) = (vs[i], vs[j]);
            let m = phi.eval(0.5 * (ts[i] + ts[j]));
            if !(a.is_finite() && b.is_finite() && m.is_finite()) {
                continue;
            }
            let chord = 0.5 * (a + b);
            if m - chord > CONVEXITY_RTOL * chord.abs().max(f64::MIN_POSITIVE) {
                return false;
            }
        }
    }
    true
}

/// `Φ_T`: zero on `[0, T]`, the segment from `(T, 0)` tangent to the graph
/// at `T*`, and `Φ` beyond `T*`. Returns `phi` unchanged when `Φ(T) = 0`.
///
/// The tangency `Φ′(s)(s − T) = Φ(s)` is solved in the form
/// `H′(s)(s − T) = 1` by bisection, which stays finite for fast growth.
pub fn convexify_tail(phi: &GrowthFunction, anchor: f64) -> Result<GrowthFunction> {
    if !(anchor.is_finite() && anchor >= 0.0) {
        return Err(Error::InvalidParameter("anchor must be finite and nonnegative"));
    }
    if phi.eval(anchor) == 0.0 {
        return Ok(phi.clone());
    }
    let touching = |s: f64| phi.log_derivative(s) * (s - anchor) - 1.0;
    let mut lo = anchor;
    let mut span = 1.0f64.max(anchor);
    let mut hi = anchor + span;
    loop {
        let g = touching(hi);
        if g >= 0.0 {
            break;
        }
        span *= 2.0;
        let next = anchor + span;
        if !g.is_finite() || span > 1e12 || next >= phi.blow_up_t() {
            return Err(Error::TangentNotFound { anchor, bound: hi });
        }
        lo = hi;
        hi = next;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if touching(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let touch = hi;
    let slope = phi.eval(touch) / (touch - anchor);
    if !(slope.is_finite() && slope > 0.0) {
        return Err(Error::TangentNotFound { anchor, bound: touch });
    }
    Ok(GrowthFunction::convexified(phi.clone(), anchor, touch, slope))
}
