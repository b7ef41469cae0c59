//! The six divergence conditions and the classifier.

use alloc::vec::Vec;

use super::closed::{self, tail_flags};
use super::GrowthFunction;
use crate::ladder::{classify_cumulative, LadderParams, Verdict};
use crate::quad::adaptive_simpson;
use crate::real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionId {
    /// `∫ H′(t) dt/t`
    Y,
    /// `∫ dH(t)/t`
    F,
    /// `∫ H(t) dt/t²`
    B,
    /// `∫ H(1/t) dt`
    C,
    /// `∫ dη/H⁻¹(η)`
    D,
    /// `∫ dτ/(τ Φ⁻¹(τ))`
    A,
}

impl ConditionId {
    pub const ALL: [ConditionId; 6] =
        [ConditionId::Y, ConditionId::F, ConditionId::B, ConditionId::C, ConditionId::D, ConditionId::A];

    pub fn label(self) -> &'static str {
        match self {
            ConditionId::Y => "Y",
            ConditionId::F => "F",
            ConditionId::B => "B",
            ConditionId::C => "C",
            ConditionId::D => "D",
            ConditionId::A => "A",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ConditionId::ALL.into_iter().find(|c| c.label().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    NumericLadder,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::NumericLadder => "numeric-ladder",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Closed form when the family has one, the ladder otherwise.
    #[default]
    Auto,
    ClosedForm,
    NumericLadder,
}

/// One condition with its lower cutoff and ladder.
///
/// The ladder variable is `t` for `Y`, `F`, `B`; for `C` the rungs are the
/// shrinking lower limits `ε_k = ε₀·2^{−k}` of `∫_ε^δ`; for `D` it is `η`;
/// for `A` it is `s = log τ` (the substitution `τ = e^s` turns the
/// integrand into `ds/Φ⁻¹(e^s)`, and doubling in `s` rather than in `τ` is
/// what lets the ladder separate `1/s` from `1/s²` tails).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionProbe {
    pub id: ConditionId,
    /// `Δ`, `δ`, `Δ*` or `δ*`.
    pub lower: f64,
    /// First rung; defaults per condition when `None`.
    pub first_rung: Option<f64>,
    pub ladder: LadderParams,
    pub method: MethodChoice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionVerdict {
    pub id: ConditionId,
    pub verdict: Verdict,
    /// `(rung, truncated integral)` pairs.
    pub evidence: Vec<(f64, f64)>,
    pub method: Method,
}

impl ConditionProbe {
    pub fn new(id: ConditionId, lower: f64) -> Self {
        ConditionProbe { id, lower, first_rung: None, ladder: LadderParams::default(), method: MethodChoice::Auto }
    }

    /// The probe with the default cutoff for `phi`.
    pub fn default_for(phi: &GrowthFunction, id: ConditionId) -> Result<Self> {
        let t0 = phi.t0();
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("Φ vanishes identically"));
        }
        let lower = match id {
            ConditionId::Y | ConditionId::F | ConditionId::B => t0 + 1.0,
            ConditionId::C => {
                if t0 <= 0.5 {
                    1.0
                } else {
                    0.5 / t0
                }
            }
            ConditionId::D => {
                let h = phi.log_at_zero_plus();
                if h.is_finite() {
                    h + 1.0
                } else {
                    1.0
                }
            }
            ConditionId::A => phi.at_zero_plus() + 1.0,
        };
        Ok(ConditionProbe::new(id, lower))
    }

    pub fn with_method(mut self, method: MethodChoice) -> Self {
        self.method = method;
        self
    }

    pub fn with_ladder(mut self, ladder: LadderParams) -> Self {
        self.ladder = ladder;
        self
    }

    /// Enforce `Δ > t₀`, `δ < 1/t₀`, `Δ* > H(+0)`, `δ* > Φ(+0)`.
    pub fn validate(&self, phi: &GrowthFunction) -> Result<()> {
        let x = self.lower;
        if !x.is_finite() {
            return Err(Error::CutoffViolation("cutoff must be finite"));
        }
        match self.id {
            ConditionId::Y | ConditionId::F | ConditionId::B if x <= phi.t0() => {
                Err(Error::CutoffViolation("Δ must exceed t₀"))
            }
            ConditionId::C if x <= 0.0 || x * phi.t0() >= 1.0 => Err(Error::CutoffViolation("δ must lie in (0, 1/t₀)")),
            ConditionId::D if x <= phi.log_at_zero_plus() => Err(Error::CutoffViolation("Δ* must exceed H(+0)")),
            ConditionId::A if x <= phi.at_zero_plus() => Err(Error::CutoffViolation("δ* must exceed Φ(+0)")),
            _ => Ok(()),
        }
    }

    /// The rungs of the ladder.
    pub fn rungs(&self, phi: &GrowthFunction) -> Vec<f64> {
        let n = self.ladder.k_max + 1;
        match self.id {
            ConditionId::C => {
                let e0 = self.first_rung.unwrap_or(self.lower / 10.0);
                (0..n).map(|k| e0 * real::powf(0.5, k as f64)).collect()
            }
            _ => {
                let r0 = self.first_rung.unwrap_or_else(|| match self.id {
                    ConditionId::D => 10.0 * self.lower.max(1.0),
                    ConditionId::A => 10.0 * real::ln(self.lower).max(1.0),
                    _ => 10.0 * self.lower.max(phi.t0() + 1.0),
                });
                (0..n).map(|k| r0 * real::powf(2.0, k as f64)).collect()
            }
        }
    }
}

/// `∫_a^b f` split at `breaks`; pieces with `a > 0` are integrated in `log t`.
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let mut pts = Vec::with_capacity(breaks.len() + 2);
    pts.push(a);
    pts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    pts.push(b);
    pts.windows(2).map(|w| piece(f, w[0], w[1])).sum()
}

fn piece(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    // stay off the endpoints so one-sided limits are used at breaks
    let run = |g: &dyn Fn(f64) -> f64, lo: f64, hi: f64| {
        let w = hi - lo;
        let (lo, hi) = (lo + 1e-13 * w, hi - 1e-13 * w);
        let crude: f64 = (0..16).map(|i| g(lo + (i as f64 + 0.5) * (hi - lo) / 16.0)).sum::<f64>() * (hi - lo) / 16.0;
        if !crude.is_finite() {
            return crude;
        }
        adaptive_simpson(&|x| g(x), lo, hi, (1e-11 * crude.abs()).max(1e-15))
    };
    if a > 0.0 && b.is_finite() {
        run(
            &|u: f64| {
                let t = real::exp(u);
                f(t) * t
            },
            real::ln(a),
            real::ln(b),
        )
    } else {
        run(f, a, b)
    }
}

fn closed_segment(phi: &GrowthFunction, id: ConditionId, a: f64, b: f64) -> Option<f64> {
    match id {
        ConditionId::Y => closed::y_integral(phi, a, b),
        ConditionId::F => closed::stieltjes(phi, a, b),
        ConditionId::B => closed::b_integral(phi, a, b),
        ConditionId::C => closed::b_integral(phi, 1.0 / b, 1.0 / a),
        ConditionId::D | ConditionId::A => closed::eta_integral(phi, a, b),
    }
}

fn numeric_segment(phi: &GrowthFunction, id: ConditionId, a: f64, b: f64) -> f64 {
    match id {
        ConditionId::Y | ConditionId::F => {
            if b > phi.blow_up_t() {
                return f64::INFINITY;
            }
            let cont = integrate(&|t| phi.log_derivative(t) / t, a, b, &phi.kinks(a, b));
            if id == ConditionId::F {
                cont + closed::jump_sum(phi, a, b)
            } else {
                cont
            }
        }
        ConditionId::B => integrate(&|t| phi.log_eval(t) / (t * t), a, b, &phi.kinks(a, b)),
        ConditionId::C => {
            let mut breaks: Vec<f64> = phi.kinks(1.0 / b, 1.0 / a).iter().map(|t| 1.0 / t).collect();
            breaks.reverse();
            integrate(&|t| phi.log_eval(1.0 / t), a, b, &breaks)
        }
        ConditionId::D | ConditionId::A => integrate(&|eta| 1.0 / phi.log_inverse(eta), a, b, &phi.log_kinks(a, b)),
    }
}

/// The lower limit of the integral in the ladder variable.
fn start(probe: &ConditionProbe) -> f64 {
    match probe.id {
        ConditionId::A => real::ln(probe.lower),
        _ => probe.lower,
    }
}

fn evidence(phi: &GrowthFunction, probe: &ConditionProbe, method: Method) -> Option<Vec<(f64, f64)>> {
    let rungs = probe.rungs(phi);
    let s = start(probe);
    let mut out = Vec::with_capacity(rungs.len());
    let mut acc = 0.0;
    let mut prev = s;
    for &r in &rungs {
        // C integrates over [ε_k, δ]; the new piece is [ε_k, ε_{k−1}]
        let (a, b) = if probe.id == ConditionId::C { (r, prev) } else { (prev, r) };
        let inc = match method {
            Method::ClosedForm => closed_segment(phi, probe.id, a, b)?,
            Method::NumericLadder => numeric_segment(phi, probe.id, a, b),
        };
        acc += inc;
        out.push((r, acc));
        prev = r;
    }
    Some(out)
}

fn symbolic(phi: &GrowthFunction, id: ConditionId) -> Option<Verdict> {
    let f = tail_flags(phi)?;
    let div = match id {
        ConditionId::Y => f.y,
        ConditionId::F | ConditionId::D | ConditionId::A => f.y || f.jumps,
        ConditionId::B | ConditionId::C => f.b,
    };
    Some(if div { Verdict::Divergent } else { Verdict::Convergent })
}

/// Decide one condition for `phi`.
pub fn classify(phi: &GrowthFunction, probe: &ConditionProbe) -> Result<ConditionVerdict> {
    probe.validate(phi)?;
    let method = match probe.method {
        MethodChoice::Auto if phi.has_closed_form() => Method::ClosedForm,
        MethodChoice::Auto | MethodChoice::NumericLadder => Method::NumericLadder,
        MethodChoice::ClosedForm if phi.has_closed_form() => Method::ClosedForm,
        MethodChoice::ClosedForm => {
            return Err(Error::InvalidParameter("no closed form for this family"));
        }
    };
    let evidence = evidence(phi, probe, method).ok_or(Error::InvalidParameter("no closed form for this family"))?;
    let verdict = match method {
        Method::ClosedForm => symbolic(phi, probe.id).ok_or(Error::InvalidParameter("no closed form"))?,
        Method::NumericLadder => {
            let values: Vec<f64> = evidence.iter().map(|e| e.1).collect();
            classify_cumulative(&values, &probe.ladder)
        }
    };
    Ok(ConditionVerdict { id: probe.id, verdict, evidence, method })
}
