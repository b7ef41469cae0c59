//! Closed-form definite integrals of the continuous parts of the
//! conditions, per family. All integrals assume `lo > t₀`.

use super::special::{exp_integral_e1, solve_u_plus_ln_u};
use super::{powi, staircase_jump_range, Family, GrowthFunction};
use crate::real;

/// Which tails are infinite, read off the family's parameters.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TailFlags {
    /// `∫^∞ H′(t) dt/t = ∞`
    pub y: bool,
    /// `∫^∞ H(t) dt/t² = ∞`
    pub b: bool,
    /// `Σ ΔH(t_i)/t_i = ∞`
    pub jumps: bool,
}

pub(crate) fn tail_flags(phi: &GrowthFunction) -> Option<TailFlags> {
    let none = TailFlags { y: false, b: false, jumps: false };
    let blow = phi.blow_up_t().is_finite();
    let flags = match phi.family() {
        Family::Power { .. } | Family::TLogT | Family::PiecewiseLinear { .. } | Family::Step { .. } => none,
        Family::Exponential { .. } => TailFlags { y: true, b: true, jumps: false },
        Family::ExpPower { beta, .. } => TailFlags { y: *beta >= 1.0, b: *beta >= 1.0, jumps: false },
        Family::Staircase { .. } => TailFlags { y: false, b: true, jumps: true },
        Family::Tabulated { .. } => return None,
        Family::Convexified { base, .. } => tail_flags(base)?,
    };
    Some(if blow { TailFlags { y: true, b: true, jumps: true } } else { flags })
}

/// `∫_u^w t^q dt`.
fn power_integral(q: f64, u: f64, w: f64) -> f64 {
    if (q + 1.0).abs() < 1e-14 {
        real::ln(w / u)
    } else {
        (real::powf(w, q + 1.0) - real::powf(u, q + 1.0)) / (q + 1.0)
    }
}

/// `∫_u^w a/(t(at+b)) dt`, i.e. `∫ H′/t` on a linear piece `Φ = at + b`.
fn line_y(a: f64, b: f64, u: f64, w: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        1.0 / u - 1.0 / w
    } else {
        a / b * (libm::log1p(b / (a * u)) - libm::log1p(b / (a * w)))
    }
}

/// `∫_u^w log(at+b) dt/t²`.
fn line_b(a: f64, b: f64, u: f64, w: f64) -> f64 {
    real::ln(a * u + b) / u - real::ln(a * w + b) / w + line_y(a, b, u, w)
}

fn tlogt_y(t: f64) -> f64 {
    -1.0 / t - exp_integral_e1(real::ln(t))
}

fn tlogt_b(t: f64) -> f64 {
    let l = real::ln(t);
    -(l + 1.0 + real::ln(l)) / t - exp_integral_e1(l)
}

/// Sum of `piece(a, b, u, w)` over the linear pieces of a knot list
/// intersected with `[lo, hi]`.
fn over_knots(knots: &[(f64, f64)], lo: f64, hi: f64, piece: fn(f64, f64, f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for i in 0..knots.len() {
        let start = knots[i].0;
        let end = if i + 1 < knots.len() { knots[i + 1].0 } else { f64::INFINITY };
        let u = lo.max(start);
        let w = hi.min(end);
        if u >= w {
            continue;
        }
        let (a, b) = GrowthFunction::pl_piece(knots, u);
        total += piece(a, b, u, w);
    }
    total
}

/// `∫_lo^hi H′(t) dt/t` over the absolutely continuous part.
pub(crate) fn y_integral(phi: &GrowthFunction, lo: f64, hi: f64) -> Option<f64> {
    if hi <= lo {
        return Some(0.0);
    }
    if hi > phi.blow_up_t() {
        return Some(f64::INFINITY);
    }
    Some(match phi.family() {
        Family::Power { p } => p * (1.0 / lo - 1.0 / hi),
        Family::Exponential { alpha } => alpha * real::ln(hi / lo),
        Family::ExpPower { alpha, beta } => alpha * beta * power_integral(beta - 2.0, lo, hi),
        Family::TLogT => tlogt_y(hi) - tlogt_y(lo),
        Family::PiecewiseLinear { knots } => over_knots(knots, lo, hi, line_y),
        Family::Step { .. } | Family::Staircase { .. } => 0.0,
        Family::Tabulated { .. } => return None,
        Family::Convexified { base, anchor, touch, slope } => {
            let mut total = 0.0;
            let (u, w) = (lo.max(*anchor), hi.min(*touch));
            if u < w {
                total += line_y(*slope, -slope * anchor, u, w);
            }
            if hi > *touch {
                total += y_integral(base, lo.max(*touch), hi)?;
            }
            total
        }
    })
}

/// `∫_lo^hi H(t) dt/t²`.
pub(crate) fn b_integral(phi: &GrowthFunction, lo: f64, hi: f64) -> Option<f64> {
    if hi <= lo {
        return Some(0.0);
    }
    if hi > phi.blow_up_t() {
        return Some(f64::INFINITY);
    }
    Some(match phi.family() {
        Family::Power { p } => p * ((real::ln(lo) + 1.0) / lo - (real::ln(hi) + 1.0) / hi),
        Family::Exponential { alpha } => alpha * real::ln(hi / lo),
        Family::ExpPower { alpha, beta } => alpha * power_integral(beta - 2.0, lo, hi),
        Family::TLogT => tlogt_b(hi) - tlogt_b(lo),
        Family::PiecewiseLinear { knots } => over_knots(knots, lo, hi, line_b),
        Family::Step { jumps } => {
            let mut total = 0.0;
            for (i, &(t, level)) in jumps.iter().enumerate() {
                let end = jumps.get(i + 1).map_or(f64::INFINITY, |j| j.0);
                let (u, w) = (lo.max(t), hi.min(end));
                if u < w {
                    total += real::ln(level) * (1.0 / u - 1.0 / w);
                }
            }
            total
        }
        Family::Staircase { alpha, ratio } => {
            let k_lo = GrowthFunction::staircase_level(*ratio, lo);
            let k_hi = GrowthFunction::staircase_level(*ratio, hi);
            if k_lo == k_hi {
                alpha * powi(*ratio, k_lo) * (1.0 / lo - 1.0 / hi)
            } else {
                let first = alpha * (powi(*ratio, k_lo) / lo - 1.0 / ratio);
                let full = alpha * (1.0 - 1.0 / ratio) * (k_hi - k_lo - 1) as f64;
                let last = alpha * (1.0 - powi(*ratio, k_hi) / hi);
                first + full + last
            }
        }
        Family::Tabulated { .. } => return None,
        Family::Convexified { base, anchor, touch, slope } => {
            let mut total = 0.0;
            let (u, w) = (lo.max(*anchor), hi.min(*touch));
            if u < w {
                total += line_b(*slope, -slope * anchor, u, w);
            }
            if hi > *touch {
                total += b_integral(base, lo.max(*touch), hi)?;
            }
            total
        }
    })
}

/// `Σ ΔH(t_i)/t_i` over jumps with `lo < t_i ≤ hi`.
pub(crate) fn jump_sum(phi: &GrowthFunction, lo: f64, hi: f64) -> f64 {
    if let Family::Staircase { alpha, ratio } = phi.family() {
        // every jump r^{k−1} → r^k contributes α(1 − 1/r)
        let (k1, k2) = staircase_jump_range(*ratio, lo.max(1.0), hi);
        let count = (k2 - k1 + 1).max(0) as f64;
        let below = if lo < 1.0 && hi >= 1.0 { f64::INFINITY } else { 0.0 };
        return below + count * alpha * (1.0 - 1.0 / ratio);
    }
    phi.jumps_in(lo, hi).iter().map(|&(t, before, after)| (after - before) / t).sum()
}

/// The Stieltjes integral `∫_(lo,hi] dH(t)/t`.
pub(crate) fn stieltjes(phi: &GrowthFunction, lo: f64, hi: f64) -> Option<f64> {
    Some(y_integral(phi, lo, hi)? + jump_sum(phi, lo, hi))
}

/// `∫_lo^hi dη / H⁻¹(η)`, by the substitution `η = H(t)`: the absolutely
/// continuous part becomes `∫ H′(t) dt/t`, each jump of `H` at `t_i`
/// contributes its clipped height over `t_i`, and levels above `sup H`
/// (where `H⁻¹ = ∞`) contribute nothing.
pub(crate) fn eta_integral(phi: &GrowthFunction, lo: f64, hi: f64) -> Option<f64> {
    tail_flags(phi)?;
    let sup = phi.log_eval(f64::INFINITY);
    let hi = hi.min(sup);
    if hi <= lo {
        return Some(0.0);
    }
    if let Family::TLogT = phi.family() {
        // in u = log t, so that H⁻¹(η) = e^u never overflows
        let g = |eta: f64| {
            let u = solve_u_plus_ln_u(eta);
            -real::exp(-u) - exp_integral_e1(u)
        };
        return Some(g(hi) - g(lo));
    }
    let a = phi.log_inverse(lo);
    let b = phi.log_inverse(hi);
    let mut total = if a < b { y_integral(phi, a.max(phi.t0()), b)? } else { 0.0 };
    if let Family::Staircase { alpha, ratio } = phi.family() {
        // H takes the values α r^k; the flat stretches of H⁻¹ are the jumps
        let (k1, k2) = staircase_jump_range(*ratio, a * (1.0 - 1e-12), b);
        let mut k = k1;
        while k <= k2 {
            let t = powi(*ratio, k);
            let (h0, h1) = (alpha * powi(*ratio, k - 1), alpha * powi(*ratio, k));
            total += (h1.min(hi) - h0.max(lo)).max(0.0) / t;
            k += 1;
        }
        if a <= 1.0 {
            total += (alpha.min(hi) - lo).max(0.0);
        }
        return Some(total);
    }
    let from = if a > 0.0 { a * (1.0 - 1e-12) } else { -1.0 };
    for (t, before, after) in phi.jumps_in(from, b) {
        total += (after.min(hi) - before.max(lo)).max(0.0) / t;
    }
    Some(total)
}
