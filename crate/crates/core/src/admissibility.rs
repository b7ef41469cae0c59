//! Circle averages of dilatation fields, the Lehto-type divergence check
//! `∫₀^δ dr/(r k(r)) = ∞`, `Φ`-area integrals and the averaging pipeline
//! that ties them together.
//!
//! Every verdict here is numerical evidence, not a proof.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::grid::{area_integral, GridSpec, Mask, ScalarField, Weight};
use crate::growth::{classify, convexity_test, ConditionId, ConditionProbe, ConditionVerdict, GrowthFunction};
use crate::ladder::{classify_cumulative, LadderParams, Verdict};
use crate::real;
use crate::sum::pairwise_sum;
use crate::{Error, Result};

/// Radii per decade in [`default_radii`].
pub const RADII_PER_DECADE: f64 = 32.0;

/// Relative spread below which the innermost averages count as bounded.
pub const BOUNDED_SPREAD: f64 = 1e-3;

/// Circle averages `k(r_j)` of a field around `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialAverage {
    pub center: Complex64,
    pub radii: Vec<f64>,
    pub averages: Vec<f64>,
}

impl RadialAverage {
    pub fn new(center: Complex64, radii: Vec<f64>, averages: Vec<f64>) -> Result<Self> {
        if radii.len() != averages.len() || radii.len() < 2 {
            return Err(Error::InvalidParameter("need at least two radii, one average each"));
        }
        if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[1] > w[0])) || !radii[radii.len() - 1].is_finite() {
            return Err(Error::InvalidParameter("radii must be positive and strictly increasing"));
        }
        Ok(RadialAverage { center, radii, averages })
    }

    /// Sample a closed-form profile `k(r)`.
    pub fn from_profile(center: Complex64, radii: Vec<f64>, k: impl Fn(f64) -> f64) -> Result<Self> {
        let averages = radii.iter().map(|r| k(*r)).collect();
        Self::new(center, radii, averages)
    }

    /// The outer radius `δ`.
    pub fn delta(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }
}

/// `0.9·dist(z₀, ∂box)`.
pub fn default_delta(grid: &GridSpec, z0: Complex64) -> f64 {
    0.9 * grid.distance_to_boundary(z0)
}

/// Geometric radii from `4h` to `delta`, 32 per decade, both ends included.
pub fn default_radii(grid: &GridSpec, delta: f64) -> Result<Vec<f64>> {
    let lo = 4.0 * grid.spacing();
    if !(delta > lo) || !delta.is_finite() {
        return Err(Error::InvalidParameter("δ must exceed four grid spacings"));
    }
    let decades = real::ln(delta / lo) / core::f64::consts::LN_10;
    let n = (real::ceil(RADII_PER_DECADE * decades) as usize).max(1);
    let step = real::ln(delta / lo) / n as f64;
    let mut radii: Vec<f64> = (0..n).map(|j| lo * real::exp(step * j as f64)).collect();
    radii.push(delta);
    Ok(radii)
}

/// `(i+1)/6` lattice of 5×5 interior centers.
pub fn default_centers(grid: &GridSpec) -> Vec<Complex64> {
    let (c, hw) = (grid.center(), grid.half_width());
    let at = |i: usize| -hw + 2.0 * hw * (i + 1) as f64 / 6.0;
    let mut out = Vec::with_capacity(25);
    for j in 0..5 {
        for i in 0..5 {
            out.push(c + Complex64::new(at(i), at(j)));
        }
    }
    out
}

/// Mean of bilinear samples of `field` at `max(64, ⌈2πr/h⌉)` equispaced
/// angles on each circle.
pub fn circle_average(field: &ScalarField, z0: Complex64, radii: &[f64]) -> Result<RadialAverage> {
    let grid = field.grid();
    let reach = grid.distance_to_boundary(z0) - 0.5 * grid.spacing();
    let mut averages = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r < reach) {
            return Err(Error::CircleExitsGrid { radius: r });
        }
        let m = (real::ceil(2.0 * core::f64::consts::PI * r / grid.spacing()) as usize).max(64);
        let mut samples = Vec::with_capacity(m);
        for a in 0..m {
            let t = 2.0 * core::f64::consts::PI * a as f64 / m as f64;
            let z = z0 + Complex64::new(r * real::cos(t), r * real::sin(t));
            samples.push(field.bilinear(z).ok_or(Error::CircleExitsGrid { radius: r })?);
        }
        averages.push(pairwise_sum(&samples) / m as f64);
    }
    RadialAverage::new(z0, radii.to_vec(), averages)
}

/// How `k(r)` is continued below the innermost resolved radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extrapolation {
    /// `k ≡ level`.
    Bounded { level: f64 },
    /// `k = a + b·ln(1/r)`, `b ≥ 0`.
    LogAffine { a: f64, b: f64 },
    /// `k = c·r^{−a}`, `a ≥ 0`.
    Power { c: f64, a: f64 },
}

impl Extrapolation {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Extrapolation::Bounded { level } => level,
            Extrapolation::LogAffine { a, b } => a + b * real::ln(1.0 / r),
            Extrapolation::Power { c, a } => c * real::powf(r, -a),
        }
    }

    /// `∫_lo^hi dr/(r k(r))`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let (u0, u1) = (real::ln(1.0 / hi), real::ln(1.0 / lo));
        match *self {
            Extrapolation::Bounded { level } => (u1 - u0) / level,
            Extrapolation::LogAffine { a, b } => {
                if b == 0.0 {
                    (u1 - u0) / a
                } else {
                    real::ln((a + b * u1) / (a + b * u0)) / b
                }
            }
            Extrapolation::Power { c, a } => {
                if a == 0.0 {
                    (u1 - u0) / c
                } else {
                    (real::exp(-a * u0) - real::exp(-a * u1)) / (a * c)
                }
            }
        }
    }
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (my - slope * mx, slope)
}

fn flat_level(k: &[f64]) -> Option<f64> {
    let mean = k.iter().sum::<f64>() / k.len() as f64;
    let (lo, hi) = k.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    ((hi - lo) <= BOUNDED_SPREAD * mean).then_some(mean)
}

/// Fit the innermost decade of finite averages (at least three points).
/// `Bounded` is tried first on the innermost quarter decade.
pub fn fit_extrapolation(avg: &RadialAverage) -> Extrapolation {
    let r0 = avg.radii[0];
    let mut n = avg.radii.iter().take_while(|r| **r <= 10.0 * r0).count().max(3).min(avg.radii.len());
    while n > 1 && !avg.averages[..n].iter().all(|k| k.is_finite()) {
        n -= 1;
    }
    let (r, k) = (&avg.radii[..n], &avg.averages[..n]);
    if n < 2 || k.iter().any(|v| !v.is_finite()) {
        return Extrapolation::Bounded { level: avg.averages[0] };
    }
    // a flat innermost quarter decade wins even when the decade is not flat
    let quarter = r.iter().take_while(|v| **v <= real::powf(10.0, 0.25) * r0).count().max(3).min(n);
    for m in [quarter, n] {
        if let Some(level) = flat_level(&k[..m]) {
            return Extrapolation::Bounded { level };
        }
    }
    let u: Vec<f64> = r.iter().map(|v| real::ln(1.0 / v)).collect();
    let misfit = |e: &Extrapolation| {
        let s: f64 = r
            .iter()
            .zip(k)
            .map(|(rr, kk)| {
                let d = (e.eval(*rr) - kk) / kk;
                d * d
            })
            .sum();
        s / n as f64
    };
    let mut best: Option<(f64, Extrapolation)> = None;
    let mut consider = |e: Extrapolation| {
        let m = misfit(&e);
        if m.is_finite() && best.is_none_or(|(bm, _)| m < bm) {
            best = Some((m, e));
        }
    };
    let (a, b) = linear_fit(&u, k);
    if b >= 0.0 && a + b * u[0] > 0.0 {
        consider(Extrapolation::LogAffine { a, b });
    }
    let lk: Vec<f64> = k.iter().map(|v| real::ln(*v)).collect();
    let (lc, pa) = linear_fit(&u, &lk);
    if pa >= 0.0 {
        consider(Extrapolation::Power { c: real::exp(lc), a: pa });
    }
    best.map(|(_, e)| e).unwrap_or(Extrapolation::Bounded { level: avg.averages[0] })
}

/// Outcome of [`lehto_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct LehtoVerdict {
    pub verdict: Verdict,
    /// `(lower limit δ·2^{−k}, ∫_{lower}^{δ} dr/(r k))`.
    pub evidence: Vec<(f64, f64)>,
    pub extrapolation: Extrapolation,
}

/// Ladder over the lower limit `δ·2^{−k}`. Resolved radii use the
/// trapezoid rule in `log r`; below the innermost radius the fitted
/// [`Extrapolation`] is integrated in closed form.
pub fn lehto_check(avg: &RadialAverage, params: &LadderParams) -> Result<LehtoVerdict> {
    for (r, k) in avg.radii.iter().zip(&avg.averages) {
        if !(*k > 0.0) {
            return Err(Error::NonPositiveAverage { radius: *r });
        }
    }
    let s: Vec<f64> = avg.radii.iter().map(|r| real::ln(*r)).collect();
    let g: Vec<f64> = avg.averages.iter().map(|k| 1.0 / k).collect();
    let n = s.len();
    // tail[j] = ∫_{s_j}^{s_{n-1}} g ds
    let mut tail = alloc::vec![0.0; n];
    for j in (0..n - 1).rev() {
        tail[j] = tail[j + 1] + 0.5 * (g[j] + g[j + 1]) * (s[j + 1] - s[j]);
    }
    let extrapolation = fit_extrapolation(avg);
    let delta = avg.delta();
    let r0 = avg.radii[0];
    let value = |lower: f64| {
        if lower >= r0 {
            let sl = real::ln(lower);
            let j = s.partition_point(|v| *v <= sl).clamp(1, n - 1) - 1;
            let w = (sl - s[j]) / (s[j + 1] - s[j]);
            let gl = g[j] + w * (g[j + 1] - g[j]);
            tail[j + 1] + 0.5 * (gl + g[j + 1]) * (s[j + 1] - sl)
        } else {
            tail[0] + extrapolation.integral(lower, r0)
        }
    };
    let evidence: Vec<(f64, f64)> = (0..=params.k_max)
        .map(|k| {
            let lower = delta * real::powf(0.5, k as f64);
            (lower, value(lower))
        })
        .collect();
    let values: Vec<f64> = evidence.iter().map(|e| e.1).collect();
    Ok(LehtoVerdict { verdict: classify_cumulative(&values, params), evidence, extrapolation })
}

/// `∫ Φ(K) w dxdy` over `include` (everything when `None`). Cells where
/// `Φ(K) = ∞` make the integral `∞`.
pub fn phi_area_integral(k: &ScalarField, phi: &GrowthFunction, weight: Weight, include: Option<&Mask>) -> f64 {
    let values = k.values().iter().map(|v| phi.eval(*v)).collect();
    area_integral(&ScalarField::from_raw(*k.grid(), values), weight, include)
}

/// Finite value whose largest cell contributes at most 1% of the total.
pub fn area_looks_finite(k: &ScalarField, phi: &GrowthFunction, weight: Weight, include: Option<&Mask>) -> (f64, bool) {
    let grid = k.grid();
    let total = phi_area_integral(k, phi, weight, include);
    if !total.is_finite() {
        return (total, false);
    }
    let largest = k
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| include.is_none_or(|m| m.get(*i)))
        .map(|(i, v)| phi.eval(*v) * weight.at(grid.point_at(i)))
        .fold(0.0f64, f64::max)
        * grid.cell_area();
    (total, largest <= 0.01 * total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    AdmissibleEvidence,
    NotAdmissibleEvidence,
    Inconclusive,
}

impl Conclusion {
    pub fn label(self) -> &'static str {
        match self {
            Conclusion::AdmissibleEvidence => "admissible-evidence",
            Conclusion::NotAdmissibleEvidence => "not-admissible-evidence",
            Conclusion::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterReport {
    pub center: Complex64,
    pub delta: f64,
    pub lehto: LehtoVerdict,
}

/// Circle averages of `k` around `z0` on the default radii, then the Lehto
/// ladder.
pub fn center_report(k: &ScalarField, z0: Complex64, params: &LadderParams) -> Result<CenterReport> {
    let delta = default_delta(k.grid(), z0);
    let avg = circle_average(k, z0, &default_radii(k.grid(), delta)?)?;
    Ok(CenterReport { center: z0, delta, lehto: lehto_check(&avg, params)? })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub area_integral: f64,
    pub area_finite: bool,
    pub weight: Weight,
    pub phi: GrowthFunction,
    pub centers: Vec<CenterReport>,
    pub conclusion: Conclusion,
}

impl AdmissibilityReport {
    /// Admissible evidence needs a finite area integral and every center
    /// Divergent; one Convergent center is evidence against.
    pub fn assemble(area: (f64, bool), weight: Weight, phi: GrowthFunction, centers: Vec<CenterReport>) -> Self {
        let all_div = !centers.is_empty() && centers.iter().all(|c| c.lehto.verdict == Verdict::Divergent);
        let any_conv = centers.iter().any(|c| c.lehto.verdict == Verdict::Convergent);
        let conclusion = if any_conv {
            Conclusion::NotAdmissibleEvidence
        } else if all_div && area.1 {
            Conclusion::AdmissibleEvidence
        } else {
            Conclusion::Inconclusive
        };
        AdmissibilityReport { area_integral: area.0, area_finite: area.1, weight, phi, centers, conclusion }
    }
}

/// Sequential driver over `centers`.
pub fn admissibility_report(
    k: &ScalarField,
    phi: &GrowthFunction,
    weight: Weight,
    include: Option<&Mask>,
    centers: &[Complex64],
    params: &LadderParams,
) -> Result<AdmissibilityReport> {
    let area = area_looks_finite(k, phi, weight, include);
    let reports = centers.iter().map(|z| center_report(k, *z, params)).collect::<Result<Vec<_>>>()?;
    Ok(AdmissibilityReport::assemble(area, weight, phi.clone(), reports))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineOutcome {
    /// Hypotheses hold and the conclusion is Divergent.
    Witnessed,
    HypothesesNotSatisfied,
    /// Hypotheses hold but the conclusion came out Convergent.
    FalsificationAlarm,
    Inconclusive,
}

impl PipelineOutcome {
    pub fn label(self) -> &'static str {
        match self {
            PipelineOutcome::Witnessed => "witnessed",
            PipelineOutcome::HypothesesNotSatisfied => "hypotheses-not-satisfied",
            PipelineOutcome::FalsificationAlarm => "falsification-alarm",
            PipelineOutcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub convex: bool,
    pub area_integral: f64,
    pub area_finite: bool,
    pub condition_a: ConditionVerdict,
    pub lehto: LehtoVerdict,
    pub outcome: PipelineOutcome,
}

/// Check `∫Φ(Q) < ∞` and condition A for `Φ`, then the Lehto ladder for the
/// circle averages `q(r)` of `Q` around `center` up to `delta`.
pub fn witness_pipeline(
    q: &ScalarField,
    phi: &GrowthFunction,
    include: Option<&Mask>,
    center: Complex64,
    delta: f64,
    params: &LadderParams,
) -> Result<PipelineReport> {
    let convex = convexity_test(phi);
    let (area_integral, area_finite) = area_looks_finite(q, phi, Weight::Unit, include);
    let probe = ConditionProbe::default_for(phi, ConditionId::A)?.with_ladder(*params);
    let condition_a = classify(phi, &probe)?;
    let avg = circle_average(q, center, &default_radii(q.grid(), delta)?)?;
    let lehto = lehto_check(&avg, params)?;
    let hypotheses = convex && area_finite && condition_a.verdict == Verdict::Divergent;
    let outcome = if hypotheses {
        match lehto.verdict {
            Verdict::Divergent => PipelineOutcome::Witnessed,
            Verdict::Convergent => PipelineOutcome::FalsificationAlarm,
            Verdict::Inconclusive => PipelineOutcome::Inconclusive,
        }
    } else if !convex || !area_finite || condition_a.verdict == Verdict::Convergent {
        PipelineOutcome::HypothesesNotSatisfied
    } else {
        PipelineOutcome::Inconclusive
    };
    Ok(PipelineReport { convex, area_integral, area_finite, condition_a, lehto, outcome })
}
