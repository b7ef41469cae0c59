//! Growth functions `Φ : [0, ∞] → [0, ∞]`, non-decreasing, together with
//! `H = log Φ`, the generalized inverse `Φ⁻¹(τ) = inf{t : Φ(t) ≥ τ}` and
//! the six divergence conditions
//!
//! | id  | integral                    |
//! |-----|-----------------------------|
//! | `Y` | `∫_Δ^∞ H′(t) dt/t`          |
//! | `F` | `∫_Δ^∞ dH(t)/t` (Stieltjes) |
//! | `B` | `∫_Δ^∞ H(t) dt/t²`          |
//! | `C` | `∫_0^δ H(1/t) dt`           |
//! | `D` | `∫_Δ*^∞ dη/H⁻¹(η)`          |
//! | `A` | `∫_δ*^∞ dτ/(τ Φ⁻¹(τ))`      |
//!
//! Every built-in family except [`Family::Tabulated`] carries closed-form
//! antiderivatives, which act as ground truth for the numeric ladder.

mod closed;
mod conditions;
mod convex;
mod harness;
mod special;

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::real;
use crate::{Error, Result};

pub use conditions::{classify, ConditionId, ConditionProbe, ConditionVerdict, Method, MethodChoice};
pub use convex::{convexify_tail, convexity_test};
pub use harness::{equivalence_harness, Disagreement, EquivalenceReport};
pub use special::exp_integral_e1;

/// Interpolation rule between tabulated samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    Linear,
    /// Geometric in the value (linear in `log Φ`); falls back to linear on
    /// segments touching zero.
    LogLinear,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `t^p`, `p > 0`.
    Power { p: f64 },
    /// `exp(α t)`.
    Exponential { alpha: f64 },
    /// `exp(α t^β)`.
    ExpPower { alpha: f64, beta: f64 },
    /// `max(t log t, 0)`.
    TLogT,
    /// Linear between knots `(t, Φ)`, first knot at `t = 0`; the last
    /// segment's slope continues to infinity.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// `Φ = 0` below the first jump point, `level_i` on `[t_i, t_{i+1})`.
    /// A level may be `∞`.
    Step { jumps: Vec<(f64, f64)> },
    /// `Φ = 0` on `[0, 1)` and `exp(α r^k)` on `[r^k, r^{k+1})`: a step
    /// function with infinitely many jumps.
    Staircase { alpha: f64, ratio: f64 },
    /// Samples `(t, Φ)`; `Φ` is held constant outside the sampled range.
    Tabulated { samples: Vec<(f64, f64)>, interp: Interp },
    /// `0` on `[0, T]`, the tangent segment through `(T, 0)` on `[T, T*]`,
    /// the base function beyond `T*`.
    Convexified { base: Box<GrowthFunction>, anchor: f64, touch: f64, slope: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFunction {
    family: Family,
    t0: f64,
    blow_up: f64,
}

fn positive(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::InvalidParameter(what))
    }
}

fn check_samples(samples: &[(f64, f64)], first_at_zero: bool) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("at least one sample is required"));
    }
    if first_at_zero && samples[0].0 != 0.0 {
        return Err(Error::InvalidParameter("the first knot must sit at t = 0"));
    }
    for (i, &(t, v)) in samples.iter().enumerate() {
        if !(t.is_finite() && t >= 0.0 && v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter("samples must be finite and nonnegative"));
        }
        if i > 0 {
            let (tp, vp) = samples[i - 1];
            if t <= tp {
                return Err(Error::InvalidParameter("sample abscissae must increase strictly"));
            }
            if v < vp {
                return Err(Error::InvalidParameter("growth functions must be non-decreasing"));
            }
        }
    }
    Ok(())
}

/// Index of the last sample with abscissa `≤ t` (0 if `t` is below all).
/// Least bit pattern in `(lo, hi]` passing a monotone test; `lo` fails and
/// `hi` passes.
fn bisect_bits(mut lo: u64, mut hi: u64, ok: impl Fn(u64) -> bool) -> f64 {
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    f64::from_bits(hi)
}

fn segment(samples: &[(f64, f64)], t: f64) -> usize {
    samples.partition_point(|s| s.0 <= t).saturating_sub(1)
}

fn last_zero_sample(samples: &[(f64, f64)]) -> Option<usize> {
    samples.iter().rposition(|s| s.1 == 0.0)
}

impl GrowthFunction {
    fn build(family: Family) -> Result<Self> {
        let mut g = GrowthFunction { family, t0: 0.0, blow_up: f64::INFINITY };
        g.t0 = g.compute_t0()?;
        g.blow_up = g.compute_blow_up();
        Ok(g)
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::build(Family::Power { p: positive(p, "power exponent must be positive")? })
    }

    pub fn exponential(alpha: f64) -> Result<Self> {
        Self::build(Family::Exponential { alpha: positive(alpha, "rate must be positive")? })
    }

    pub fn exp_power(alpha: f64, beta: f64) -> Result<Self> {
        Self::build(Family::ExpPower {
            alpha: positive(alpha, "rate must be positive")?,
            beta: positive(beta, "exponent must be positive")?,
        })
    }

    pub fn t_log_t() -> Self {
        GrowthFunction { family: Family::TLogT, t0: 1.0, blow_up: f64::INFINITY }
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        check_samples(&knots, true)?;
        Self::build(Family::PiecewiseLinear { knots })
    }

    pub fn step(jumps: Vec<(f64, f64)>) -> Result<Self> {
        if jumps.is_empty() {
            return Err(Error::InvalidParameter("a step function needs at least one jump"));
        }
        for (i, &(t, v)) in jumps.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidParameter("jump points must be finite and positive"));
            }
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidParameter("step levels must be positive"));
            }
            if i > 0 && (t <= jumps[i - 1].0 || v < jumps[i - 1].1) {
                return Err(Error::InvalidParameter("jumps must increase in t and level"));
            }
        }
        Self::build(Family::Step { jumps })
    }

    pub fn staircase(alpha: f64, ratio: f64) -> Result<Self> {
        let alpha = positive(alpha, "rate must be positive")?;
        if !(ratio.is_finite() && ratio > 1.0) {
            return Err(Error::InvalidParameter("staircase ratio must exceed 1"));
        }
        Self::build(Family::Staircase { alpha, ratio })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>, interp: Interp) -> Result<Self> {
        check_samples(&samples, false)?;
        Self::build(Family::Tabulated { samples, interp })
    }

    pub(crate) fn convexified(base: GrowthFunction, anchor: f64, touch: f64, slope: f64) -> Self {
        let blow_up = base.blow_up;
        GrowthFunction {
            family: Family::Convexified { base: Box::new(base), anchor, touch, slope },
            t0: anchor,
            blow_up,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Power { .. } => "power",
            Family::Exponential { .. } => "exponential",
            Family::ExpPower { .. } => "exp-power",
            Family::TLogT => "t-log-t",
            Family::PiecewiseLinear { .. } => "piecewise-linear",
            Family::Step { .. } => "step",
            Family::Staircase { .. } => "staircase",
            Family::Tabulated { .. } => "tabulated",
            Family::Convexified { .. } => "convexified",
        }
    }

    /// `sup{t : Φ(t) = 0}`, or 0 when `Φ(0) > 0`.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Least `T` with `Φ = ∞` on `[T, ∞)`, or `∞`.
    pub fn blow_up_t(&self) -> f64 {
        self.blow_up
    }

    /// The tangency point `T*` of a convexified function.
    pub fn tangent_point(&self) -> Option<f64> {
        match self.family {
            Family::Convexified { touch, .. } => Some(touch),
            _ => None,
        }
    }

    fn compute_t0(&self) -> Result<f64> {
        Ok(match &self.family {
            Family::Power { .. } | Family::Exponential { .. } | Family::ExpPower { .. } => 0.0,
            Family::TLogT | Family::Staircase { .. } => 1.0,
            Family::Step { jumps } => jumps[0].0,
            Family::Convexified { anchor, .. } => *anchor,
            Family::PiecewiseLinear { knots: s } | Family::Tabulated { samples: s, .. } => match last_zero_sample(s) {
                None => 0.0,
                Some(i) if i + 1 == s.len() => {
                    return Err(Error::InvalidParameter("Φ vanishes identically"));
                }
                Some(i) => s[i].0,
            },
        })
    }

    fn compute_blow_up(&self) -> f64 {
        match &self.family {
            Family::Step { jumps } => jumps.iter().find(|j| j.1 == f64::INFINITY).map_or(f64::INFINITY, |j| j.0),
            Family::Convexified { base, .. } => base.blow_up,
            _ => f64::INFINITY,
        }
    }

    /// Slope of the unbounded last piece of a piecewise-linear function.
    fn tail_slope(knots: &[(f64, f64)]) -> f64 {
        match knots.len() {
            1 => 0.0,
            n => (knots[n - 1].1 - knots[n - 2].1) / (knots[n - 1].0 - knots[n - 2].0),
        }
    }

    /// `(a, b)` with `Φ = a t + b` on the piecewise-linear piece containing `t`.
    pub(crate) fn pl_piece(knots: &[(f64, f64)], t: f64) -> (f64, f64) {
        let i = segment(knots, t);
        let a = if i + 1 < knots.len() {
            (knots[i + 1].1 - knots[i].1) / (knots[i + 1].0 - knots[i].0)
        } else {
            Self::tail_slope(knots)
        };
        (a, knots[i].1 - a * knots[i].0)
    }

    pub(crate) fn staircase_level(ratio: f64, t: f64) -> i32 {
        // largest k with r^k ≤ t, t ≥ 1
        let mut k = real::floor(real::ln(t) / real::ln(ratio)) as i32;
        while powi(ratio, k + 1) <= t {
            k += 1;
        }
        while k > 0 && powi(ratio, k) > t {
            k -= 1;
        }
        k
    }

    fn tab_eval(samples: &[(f64, f64)], interp: Interp, t: f64) -> f64 {
        let n = samples.len();
        if t <= samples[0].0 {
            return samples[0].1;
        }
        if t >= samples[n - 1].0 {
            return samples[n - 1].1;
        }
        let i = segment(samples, t);
        let (ta, va) = samples[i];
        let (tb, vb) = samples[i + 1];
        let th = (t - ta) / (tb - ta);
        match interp {
            Interp::LogLinear if va > 0.0 => va * real::powf(vb / va, th),
            _ => va + th * (vb - va),
        }
    }

    /// `Φ(t)`. Values above `f64::MAX` overflow to `∞`; use
    /// [`log_eval`](Self::log_eval) where that matters.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match &self.family {
            Family::Power { p } => real::powf(t, *p),
            Family::PiecewiseLinear { knots } => {
                if t == f64::INFINITY {
                    return if Self::tail_slope(knots) > 0.0 { t } else { knots[knots.len() - 1].1 };
                }
                let (a, b) = Self::pl_piece(knots, t);
                (a * t + b).max(0.0)
            }
            Family::Step { jumps } => {
                let i = jumps.partition_point(|j| j.0 <= t);
                if i == 0 {
                    0.0
                } else {
                    jumps[i - 1].1
                }
            }
            Family::Tabulated { samples, interp } => Self::tab_eval(samples, *interp, t),
            Family::Convexified { base, anchor, touch, slope } => {
                if t <= *anchor {
                    0.0
                } else if t < *touch {
                    slope * (t - anchor)
                } else {
                    base.eval(t)
                }
            }
            _ => real::exp(self.log_eval(t)),
        }
    }

    /// `H(t) = log Φ(t)`: `−∞` on the zero set, `∞` beyond the blow-up point.
    pub fn log_eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match &self.family {
            Family::Power { p } => p * real::ln(t),
            Family::Exponential { alpha } => alpha * t,
            Family::ExpPower { alpha, beta } => alpha * real::powf(t, *beta),
            Family::TLogT => {
                if t <= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    let l = real::ln(t);
                    l + real::ln(l)
                }
            }
            Family::Staircase { alpha, ratio } => {
                if t < 1.0 {
                    f64::NEG_INFINITY
                } else if t == f64::INFINITY {
                    t
                } else {
                    alpha * powi(*ratio, Self::staircase_level(*ratio, t))
                }
            }
            Family::Convexified { base, touch, .. } if t >= *touch => base.log_eval(t),
            _ => real::ln(self.eval(t)),
        }
    }

    /// `H′(t)`, defined as 0 wherever `Φ` vanishes or is locally constant
    /// (right derivative at knots).
    pub fn log_derivative(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        if t < self.t0 || t >= self.blow_up {
            return 0.0;
        }
        match &self.family {
            Family::Power { p } => p / t,
            Family::Exponential { alpha } => *alpha,
            Family::ExpPower { alpha, beta } => alpha * beta * real::powf(t, beta - 1.0),
            Family::TLogT => {
                if t <= 1.0 {
                    0.0
                } else {
                    1.0 / t + 1.0 / (t * real::ln(t))
                }
            }
            Family::PiecewiseLinear { knots } => {
                let (a, b) = Self::pl_piece(knots, t);
                let v = a * t + b;
                if v > 0.0 {
                    a / v
                } else {
                    0.0
                }
            }
            Family::Step { .. } | Family::Staircase { .. } => 0.0,
            Family::Tabulated { samples, interp } => {
                let n = samples.len();
                if t < samples[0].0 || t >= samples[n - 1].0 {
                    return 0.0;
                }
                let i = segment(samples, t);
                let (ta, va) = samples[i];
                let (tb, vb) = samples[i + 1];
                match interp {
                    Interp::LogLinear if va > 0.0 => real::ln(vb / va) / (tb - ta),
                    _ => {
                        let v = Self::tab_eval(samples, Interp::Linear, t);
                        if v > 0.0 {
                            (vb - va) / (tb - ta) / v
                        } else {
                            0.0
                        }
                    }
                }
            }
            Family::Convexified { base, anchor, touch, .. } => {
                if t <= *anchor {
                    0.0
                } else if t < *touch {
                    1.0 / (t - anchor)
                } else {
                    base.log_derivative(t)
                }
            }
        }
    }

    /// `H(+0)`.
    pub fn log_at_zero_plus(&self) -> f64 {
        self.log_eval(0.0)
    }

    /// `Φ(+0)`.
    pub fn at_zero_plus(&self) -> f64 {
        self.eval(0.0)
    }

    /// Jumps of `H` at points `t` with `lo < t ≤ hi`, as `(t, H(t−), H(t+))`.
    pub fn jumps_in(&self, lo: f64, hi: f64) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        match &self.family {
            Family::Step { jumps } => {
                for (i, &(t, v)) in jumps.iter().enumerate() {
                    if t > lo && t <= hi {
                        let before = if i == 0 { f64::NEG_INFINITY } else { real::ln(jumps[i - 1].1) };
                        out.push((t, before, real::ln(v)));
                    }
                }
            }
            Family::Staircase { alpha, ratio } => {
                if lo < 1.0 && hi >= 1.0 {
                    out.push((1.0, f64::NEG_INFINITY, *alpha));
                }
                let (k1, k2) = staircase_jump_range(*ratio, lo, hi);
                for k in k1..=k2 {
                    out.push((powi(*ratio, k), alpha * powi(*ratio, k - 1), alpha * powi(*ratio, k)));
                }
            }
            _ => {}
        }
        out
    }

    /// Points in `(lo, hi)` where `Φ` is not smooth: jumps, knots, sample
    /// abscissae and the ends of a tangent segment.
    pub fn kinks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out: Vec<f64> = match &self.family {
            Family::PiecewiseLinear { knots: s } | Family::Tabulated { samples: s, .. } => {
                s.iter().map(|k| k.0).collect()
            }
            Family::Step { .. } | Family::Staircase { .. } => self.jumps_in(lo, hi).into_iter().map(|j| j.0).collect(),
            Family::TLogT => alloc::vec![1.0],
            Family::Convexified { base, anchor, touch, .. } => {
                let mut v = base.kinks(lo, hi);
                v.push(*anchor);
                v.push(*touch);
                v
            }
            _ => Vec::new(),
        };
        out.retain(|t| *t > lo && *t < hi);
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    /// Values of `H` in `(lo, hi)` where `H⁻¹` is not smooth.
    pub fn log_kinks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let a = self.log_inverse(lo);
        let b = self.log_inverse(hi);
        let a = if a > 0.0 { a * (1.0 - 1e-12) } else { -1.0 };
        let b = if b.is_finite() { b * (1.0 + 1e-12) } else { f64::MAX };
        let mut out = Vec::new();
        for (_, before, after) in self.jumps_in(a, b) {
            out.push(before);
            out.push(after);
        }
        if !matches!(self.family, Family::Staircase { .. }) {
            for t in self.kinks(a, b) {
                out.push(self.log_eval(t));
            }
        }
        out.retain(|h| *h > lo && *h < hi);
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    /// Whether `Φ` is absolutely continuous on `[0, ∞)`.
    pub fn is_absolutely_continuous(&self) -> bool {
        match &self.family {
            Family::Step { .. } | Family::Staircase { .. } => false,
            Family::Convexified { base, .. } => base.is_absolutely_continuous(),
            _ => true,
        }
    }

    /// Whether the divergence conditions have closed-form antiderivatives.
    pub fn has_closed_form(&self) -> bool {
        match &self.family {
            Family::Tabulated { .. } => false,
            Family::Convexified { base, .. } => base.has_closed_form(),
            _ => true,
        }
    }

    /// `Φ⁻¹(τ) = inf{t ≥ 0 : Φ(t) ≥ τ}`, `∞` when the set is empty.
    ///
    /// The infimum is taken over floats against the evaluated `Φ`, so
    /// `inverse(eval(t)) <= t` holds exactly.
    pub fn inverse(&self, tau: f64) -> f64 {
        let s = self.inverse_estimate(tau);
        if !(s.is_finite() && s > 0.0) {
            return s;
        }
        self.snap_inverse(s, tau)
    }

    /// The least float `s` with `Φ(s) ≥ τ`, found by bracketing around the
    /// estimate and bisecting on the bit patterns (ordered for `s ≥ 0`).
    fn snap_inverse(&self, s: f64, tau: f64) -> f64 {
        let ok = |bits: u64| self.eval(f64::from_bits(bits)) >= tau;
        let mut hi = s.to_bits();
        let mut step = 1u64;
        while !ok(hi) {
            let next = hi.saturating_add(step);
            if !f64::from_bits(next).is_finite() {
                return s;
            }
            hi = next;
            step = step.saturating_mul(2);
        }
        step = 1;
        let lo = loop {
            let next = hi.saturating_sub(step);
            if !ok(next) {
                break next;
            }
            if next == 0 {
                return 0.0;
            }
            hi = next;
            step = step.saturating_mul(2);
        };
        bisect_bits(lo, hi, ok)
    }

    fn inverse_estimate(&self, tau: f64) -> f64 {
        if tau.is_nan() {
            return f64::NAN;
        }
        if tau <= self.eval(0.0) {
            return 0.0;
        }
        if tau == f64::INFINITY {
            return self.blow_up;
        }
        match &self.family {
            Family::Power { p } => real::powf(tau, 1.0 / p),
            Family::PiecewiseLinear { knots } => {
                let i = knots.partition_point(|k| k.1 < tau);
                if i < knots.len() {
                    let (ta, va) = knots[i - 1];
                    let (tb, vb) = knots[i];
                    ta + (tau - va) / (vb - va) * (tb - ta)
                } else {
                    let s = Self::tail_slope(knots);
                    let (tl, vl) = knots[knots.len() - 1];
                    if s > 0.0 {
                        tl + (tau - vl) / s
                    } else {
                        f64::INFINITY
                    }
                }
            }
            Family::Step { jumps } => jumps.iter().find(|j| j.1 >= tau).map_or(f64::INFINITY, |j| j.0),
            Family::Tabulated { samples, interp } => {
                let i = samples.partition_point(|k| k.1 < tau);
                if i == samples.len() {
                    return f64::INFINITY;
                }
                let (ta, va) = samples[i - 1];
                let (tb, vb) = samples[i];
                let th = match interp {
                    Interp::LogLinear if va > 0.0 => real::ln(tau / va) / real::ln(vb / va),
                    _ => (tau - va) / (vb - va),
                };
                ta + th.clamp(0.0, 1.0) * (tb - ta)
            }
            Family::Convexified { base, anchor, touch, slope } => {
                let at_touch = slope * (touch - anchor);
                if tau <= at_touch {
                    anchor + tau / slope
                } else {
                    base.inverse(tau)
                }
            }
            _ => self.log_inverse(real::ln(tau)),
        }
    }

    /// `H⁻¹(η) = Φ⁻¹(e^η)` computed without forming `e^η` where the family
    /// allows it.
    pub fn log_inverse(&self, eta: f64) -> f64 {
        if eta.is_nan() {
            return f64::NAN;
        }
        match &self.family {
            Family::Power { p } => real::exp(eta / p),
            Family::Exponential { alpha } => {
                if eta <= 0.0 {
                    0.0
                } else {
                    eta / alpha
                }
            }
            Family::ExpPower { alpha, beta } => {
                if eta <= 0.0 {
                    0.0
                } else {
                    real::powf(eta / alpha, 1.0 / beta)
                }
            }
            Family::TLogT => real::exp(special::solve_u_plus_ln_u(eta)),
            Family::Staircase { alpha, ratio } => {
                if eta == f64::NEG_INFINITY {
                    return 0.0;
                }
                if eta == f64::INFINITY {
                    return f64::INFINITY;
                }
                if eta <= *alpha {
                    return 1.0;
                }
                let mut k = real::ceil(real::ln(eta / alpha) / real::ln(*ratio)) as i32;
                while k > 0 && alpha * powi(*ratio, k - 1) >= eta {
                    k -= 1;
                }
                while alpha * powi(*ratio, k) < eta {
                    k += 1;
                }
                powi(*ratio, k)
            }
            Family::Convexified { base, anchor, touch, slope } => {
                let at_touch = slope * (touch - anchor);
                if eta <= real::ln(at_touch) {
                    anchor + real::exp(eta) / slope
                } else {
                    base.log_inverse(eta)
                }
            }
            _ => self.inverse(real::exp(eta)),
        }
    }

    /// `Φ′(t)` (right derivative), 0 on flat pieces and at jumps.
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match &self.family {
            Family::Power { p } => {
                if t == 0.0 {
                    return if *p < 1.0 {
                        f64::INFINITY
                    } else if *p == 1.0 {
                        1.0
                    } else {
                        0.0
                    };
                }
                p * real::powf(t, p - 1.0)
            }
            Family::PiecewiseLinear { knots } => Self::pl_piece(knots, t).0,
            Family::Step { .. } | Family::Staircase { .. } => 0.0,
            Family::Convexified { anchor, touch, slope, base } => {
                if t < *anchor {
                    0.0
                } else if t < *touch {
                    *slope
                } else {
                    base.derivative(t)
                }
            }
            _ => {
                let v = self.eval(t);
                if v > 0.0 {
                    v * self.log_derivative(t)
                } else if matches!(self.family, Family::TLogT) && t >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

pub(crate) fn powi(x: f64, k: i32) -> f64 {
    real::powf(x, k as f64)
}

/// Range `k1..=k2` of staircase jumps `r^k`, `k ≥ 1`, with `lo < r^k ≤ hi`.
pub(crate) fn staircase_jump_range(ratio: f64, lo: f64, hi: f64) -> (i32, i32) {
    let lr = real::ln(ratio);
    let mut k1 = if lo < 1.0 { 1 } else { (real::floor(real::ln(lo) / lr) as i32).max(1) };
    while powi(ratio, k1) <= lo {
        k1 += 1;
    }
    while k1 > 1 && powi(ratio, k1 - 1) > lo {
        k1 -= 1;
    }
    if hi < ratio {
        return (k1, k1 - 1);
    }
    let mut k2 = (real::floor(real::ln(hi) / lr) as i32).max(0);
    while powi(ratio, k2 + 1) <= hi {
        k2 += 1;
    }
    while k2 > 0 && powi(ratio, k2) > hi {
        k2 -= 1;
    }
    (k1, k2)
}
