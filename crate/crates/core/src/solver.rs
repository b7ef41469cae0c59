//! Fixed-point solver for `f_z̄ = μ f_z + ν conj(f_z)`, the truncation
//! ladder for degenerate coefficients, and the regularity and inequality
//! audits.
//!
//! Solutions are written `f = z + m z̄ + Pω` with `m = mean(ω)`. Since `P`
//! inverts `∂̄` only up to the mean, the `m z̄` term makes `f_z̄ = ω` hold
//! exactly, and `f_z = 1 + Sω`. The unknown density solves
//! `ω = μ(1 + Sω) + ν conj(1 + Sω)`, a contraction with factor
//! `k = sup(|μ|+|ν|)` because `‖Sω‖ ≤ ‖ω‖`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::coefficients::CoefficientPair;
use crate::grid::{jacobian, l2_norm, ComplexField, GridSpec, Mask, Region, ScalarField};
use crate::real;
use crate::spectral::SpectralPlan;
use crate::sum::pairwise_sum_by;
use crate::{Error, Result};

/// A map sampled on the grid together with its Wirtinger derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub f: ComplexField,
    pub fz: ComplexField,
    pub fzb: ComplexField,
}

impl Solution {
    pub fn identity(grid: GridSpec) -> Self {
        Solution {
            f: ComplexField::identity(grid),
            fz: ComplexField::filled(grid, Complex64::new(1.0, 0.0)),
            fzb: ComplexField::zeros(grid),
        }
    }

    /// `f(z) = a z + b z̄`.
    pub fn affine(grid: GridSpec, a: Complex64, b: Complex64) -> Self {
        Solution {
            f: ComplexField::from_fn(grid, |z| a * z + b * z.conj()),
            fz: ComplexField::filled(grid, a),
            fzb: ComplexField::filled(grid, b),
        }
    }

    pub fn jacobian(&self) -> ScalarField {
        jacobian(&self.fz, &self.fzb).expect("fields share a grid")
    }

    /// `conj f`, whose derivatives are `(conj f_z̄, conj f_z)`: the
    /// orientation-reversing twin.
    pub fn conjugated(&self) -> Self {
        Solution { f: self.f.conj(), fz: self.fzb.conj(), fzb: self.fz.conj() }
    }

    pub fn grid(&self) -> &GridSpec {
        self.f.grid()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: Solution,
    /// `Pω`, the periodic part of `f`.
    pub potential: ComplexField,
    /// `m = mean(ω)`.
    pub mean: Complex64,
    /// `(iteration, relative L² update)`.
    pub log: Vec<(usize, f64)>,
    /// `‖f_z̄ − μ f_z − ν conj f_z‖ / ‖f_z̄‖` with the solver's operators.
    pub residual: f64,
    /// `sup(|μ| + |ν|)`.
    pub contraction: f64,
    pub regularity: RegularityReport,
    /// Whether the last update fell below the tolerance.
    pub converged: bool,
}

impl SolveResult {
    /// `ω = f_z̄`.
    pub fn omega(&self) -> &ComplexField {
        &self.solution.fzb
    }

    pub fn iterations(&self) -> usize {
        self.log.len()
    }
}

fn one_plus(s: &ComplexField) -> ComplexField {
    s.map(|v| v + 1.0)
}

/// `T(ω) = μ(1 + Sω) + ν conj(1 + Sω)`.
pub fn contraction_step(pair: &CoefficientPair, plan: &SpectralPlan, omega: &ComplexField) -> Result<ComplexField> {
    pair.mu().same_grid(omega)?;
    let fz = one_plus(&plan.beurling_unchecked(omega));
    Ok(apply_coefficients(pair, &fz))
}

fn apply_coefficients(pair: &CoefficientPair, fz: &ComplexField) -> ComplexField {
    let (mu, nu) = (pair.mu().values(), pair.nu().values());
    let v = fz.values().iter().enumerate().map(|(k, w)| mu[k] * w + nu[k] * w.conj()).collect();
    ComplexField::new(*fz.grid(), v).expect("finite coefficients")
}

fn check_elliptic(pair: &CoefficientPair, plan: &SpectralPlan) -> Result<f64> {
    if pair.grid() != plan.grid() {
        return Err(Error::GridMismatch);
    }
    let k = pair.sup_ellipticity();
    if !pair.degenerate_mask().is_empty() || k >= 1.0 {
        return Err(Error::Ellipticity { k });
    }
    plan.check_padding(pair.mu())?;
    plan.check_padding(pair.nu())?;
    Ok(k)
}

fn relative(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Iterate `ω ← T(ω)` from `ω = 0` until the relative `L²` update drops
/// below `tol`.
pub fn solve_elliptic(pair: &CoefficientPair, plan: &SpectralPlan, tol: f64, max_iter: usize) -> Result<SolveResult> {
    let r = iterate_elliptic(pair, plan, tol, max_iter)?;
    if !r.converged {
        return Err(Error::IterationBudget { log: r.log });
    }
    Ok(r)
}

/// As [`solve_elliptic`], but an exhausted budget returns the last iterate
/// with `converged = false`.
pub fn iterate_elliptic(pair: &CoefficientPair, plan: &SpectralPlan, tol: f64, max_iter: usize) -> Result<SolveResult> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidParameter("tolerance and iteration budget must be positive"));
    }
    let k = check_elliptic(pair, plan)?;
    let grid = *plan.grid();
    let mut omega = ComplexField::zeros(grid);
    let mut log = Vec::new();
    let mut converged = false;
    for it in 1..=max_iter {
        let next = contraction_step(pair, plan, &omega)?;
        let update = relative(l2_norm(&next.sub(&omega)?, None), l2_norm(&next, None));
        omega = next;
        log.push((it, update));
        if update < tol {
            converged = true;
            break;
        }
    }
    let fz = one_plus(&plan.beurling_unchecked(&omega));
    let residual = relative(l2_norm(&omega.sub(&apply_coefficients(pair, &fz))?, None), l2_norm(&omega, None));
    let potential = plan.cauchy_unchecked(&omega);
    let mean = omega.mean();
    let f = potential.zip_with(&ComplexField::identity(grid), |p, z| z + mean * z.conj() + p)?;
    let solution = Solution { f, fz, fzb: omega };
    let regularity = regularity_audit(&solution, &pair.dilatation(), None);
    Ok(SolveResult { solution, potential, mean, log, residual, contraction: k, regularity, converged })
}

/// Rungs of a truncation ladder with the Cauchy gaps between consecutive
/// rungs.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderResult {
    /// `(cap n, solution)`, by increasing `n`.
    pub rungs: Vec<(f64, SolveResult)>,
    /// `‖f_m − f_{m−1}‖ / ‖f_m‖` on `region`, one per consecutive pair.
    pub gaps: Vec<f64>,
    pub region: Region,
    pub gap_tol: f64,
    pub converged: bool,
}

/// The default caps `2, 4, …, 256`.
pub fn default_caps() -> Vec<f64> {
    (1..=8).map(|e| real::powf(2.0, e as f64)).collect()
}

/// The default audit box: the central quarter of the grid by area.
pub fn default_audit_region(grid: &GridSpec) -> Result<Region> {
    Region::central(grid, 0.5)
}

/// Assemble a ladder from independently solved rungs.
pub fn ladder_from_rungs(mut rungs: Vec<(f64, SolveResult)>, region: Region, gap_tol: f64) -> Result<LadderResult> {
    rungs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::with_capacity(rungs.len().saturating_sub(1));
    for w in rungs.windows(2) {
        let (prev, cur) = (&w[0].1.solution.f, &w[1].1.solution.f);
        gaps.push(relative(l2_norm(&cur.sub(prev)?, Some(region)), l2_norm(cur, Some(region))));
    }
    let converged = rungs.iter().all(|r| r.1.converged) && gaps.last().is_some_and(|g| *g < gap_tol);
    Ok(LadderResult { rungs, gaps, region, gap_tol, converged })
}

/// Solve each truncation `K ≤ n` of a possibly degenerate pair. No warm
/// start: rungs above the largest finite dilatation reproduce the same
/// iteration and give a zero gap.
pub fn solve_degenerate(
    pair: &CoefficientPair,
    plan: &SpectralPlan,
    caps: &[f64],
    tol: f64,
    max_iter: usize,
    gap_tol: f64,
    region: Option<Region>,
) -> Result<LadderResult> {
    if caps.is_empty() || caps.windows(2).any(|w| w[1] <= w[0]) || caps[0] <= 1.0 {
        return Err(Error::InvalidParameter("ladder caps must exceed 1 and increase"));
    }
    let region = match region {
        Some(r) => r,
        None => default_audit_region(plan.grid())?,
    };
    let mut rungs = Vec::with_capacity(caps.len());
    for &n in caps {
        let truncated = pair.truncate(n)?;
        rungs.push((n, solve_elliptic(&truncated, plan, tol, max_iter)?));
    }
    ladder_from_rungs(rungs, region, gap_tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityReport {
    /// Cells taken into account.
    pub cells: usize,
    /// `ε_J = 10⁻¹²·median(|f_z|)²`.
    pub eps_j: f64,
    /// Fraction with `J_f > ε_J`.
    pub positive_jacobian: f64,
    /// Fraction with `|f_z̄| ≤ |f_z|(1 + 10⁻⁸)`.
    pub bounded_ratio: f64,
    /// Fraction with `|f_z| + |f_z̄| ≤ K^{1/2} J^{1/2} (1 + 10⁻⁶)`.
    pub derivative_chain: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Pointwise regularity fractions over the cells selected by `include`
/// (all cells when `None`). Cells with infinite `K` are skipped.
pub fn regularity_audit(solution: &Solution, dilatation: &ScalarField, include: Option<&Mask>) -> RegularityReport {
    let grid = solution.grid();
    let j = solution.jacobian();
    let (fz, fzb, kv) = (solution.fz.values(), solution.fzb.values(), dilatation.values());
    let cells: Vec<usize> =
        (0..grid.len()).filter(|&k| include.is_none_or(|m| m.get(k)) && kv[k].is_finite()).collect();
    let m = median(cells.iter().map(|&k| fz[k].norm()).collect());
    let eps_j = 1e-12 * m * m;
    let frac = |pred: &dyn Fn(usize) -> bool| {
        if cells.is_empty() {
            return 0.0;
        }
        cells.iter().filter(|&&k| pred(k)).count() as f64 / cells.len() as f64
    };
    let jv = j.values();
    RegularityReport {
        cells: cells.len(),
        eps_j,
        positive_jacobian: frac(&|k| jv[k] > eps_j),
        bounded_ratio: frac(&|k| fzb[k].norm() <= fz[k].norm() * (1.0 + 1e-8)),
        derivative_chain: frac(&|k| {
            jv[k] >= 0.0 && fz[k].norm() + fzb[k].norm() <= real::sqrt(kv[k] * jv[k]) * (1.0 + 1e-6)
        }),
    }
}

/// Both sides of `∫_B J ≤ |f(B)|` and `‖∂f‖_s ≤ ‖K‖_p^{1/2} |f(B)|^{1/2}`
/// with `s = 2p/(p+1)`, over the dual cells spanned by the nodes of `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub p: f64,
    pub s: f64,
    /// `|f(B)|`, summed shoelace areas of the image cells.
    pub image_area: f64,
    /// `∫_B J_f`.
    pub jacobian_integral: f64,
    /// `(|f(B)| − ∫J)/|f(B)|`.
    pub area_slack: f64,
    /// `‖∂f‖_{s,B}`.
    pub derivative_norm: f64,
    /// `‖K‖_{p,B}^{1/2} |f(B)|^{1/2}`.
    pub norm_bound: f64,
    /// `(bound − ‖∂f‖_s)/bound`.
    pub norm_slack: f64,
    /// Admissible negative slack, one grid spacing relative.
    pub tolerance: f64,
}

impl InequalityReport {
    pub fn holds(&self) -> bool {
        self.area_slack >= -self.tolerance && self.norm_slack >= -self.tolerance
    }
}

fn shoelace(q: [Complex64; 4]) -> f64 {
    let mut a = 0.0;
    for i in 0..4 {
        let (p, r) = (q[i], q[(i + 1) % 4]);
        a += p.re * r.im - r.re * p.im;
    }
    0.5 * a
}

/// Audit the two integral inequalities on `region`. Every image cell must
/// keep its orientation, a necessary condition for injectivity.
pub fn inequality_audit(
    solution: &Solution,
    dilatation: &ScalarField,
    p: f64,
    region: Region,
) -> Result<InequalityReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter("p must be finite and ≥ 1"));
    }
    solution.f.same_grid(dilatation)?;
    let grid = *solution.grid();
    let n = grid.resolution();
    if region.i1 > n || region.j1 > n || region.width() < 2 || region.height() < 2 {
        return Err(Error::InvalidParameter("region must lie in the grid and span 2x2 nodes"));
    }
    let s = 2.0 * p / (p + 1.0);
    let h2 = grid.cell_area();
    let j = solution.jacobian();
    let f = &solution.f;
    let (w, ht) = (region.width() - 1, region.height() - 1);
    let mut oriented = Ok(());
    let corners = |c: usize| {
        let (i, jj) = (region.i0 + c % w, region.j0 + c / w);
        [(i, jj), (i + 1, jj), (i + 1, jj + 1), (i, jj + 1)]
    };
    let mut areas = Vec::with_capacity(w * ht);
    for c in 0..w * ht {
        let q = corners(c).map(|ij| f[ij]);
        let a = shoelace(q);
        if !(a > 0.0) && oriented.is_ok() {
            oriented = Err(Error::NotInjective { cell: corners(c)[0] });
        }
        areas.push(a);
    }
    oriented?;
    let image_area = crate::sum::pairwise_sum(&areas);
    let cell_mean = |g: &dyn Fn((usize, usize)) -> f64| {
        pairwise_sum_by(w * ht, &|c| corners(c).iter().map(|&ij| g(ij)).sum::<f64>() * 0.25) * h2
    };
    let jacobian_integral = cell_mean(&|ij| j[ij]);
    let derivative_norm = real::powf(cell_mean(&|ij| real::powf(solution.fz[ij].norm(), s)), 1.0 / s);
    let k_norm = real::powf(cell_mean(&|ij| real::powf(dilatation[ij], p)), 1.0 / p);
    let norm_bound = real::sqrt(k_norm * image_area);
    Ok(InequalityReport {
        p,
        s,
        image_area,
        jacobian_integral,
        area_slack: (image_area - jacobian_integral) / image_area,
        derivative_norm,
        norm_bound,
        norm_slack: if norm_bound.is_infinite() { 1.0 } else { (norm_bound - derivative_norm) / norm_bound },
        tolerance: grid.spacing(),
    })
}

/// Nodes outside the annulus `|1 − |z − c|| < width` around the unit circle
/// centred at `c`: the interior-equation region for disk-supported data.
pub fn off_circle(grid: &GridSpec, center: Complex64, radius: f64, width: f64) -> Mask {
    Mask::from_fn(*grid, |z| ((z - center).norm() - radius).abs() >= width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientPair;
    use crate::grid::wirtinger_fd;

    fn disk_pair(grid: GridSpec, k: f64) -> CoefficientPair {
        let mu = ComplexField::from_fn(grid, |z| Complex64::new(if z.norm() < 1.0 { k } else { 0.0 }, 0.0));
        CoefficientPair::new(mu, ComplexField::zeros(grid)).unwrap()
    }

    #[test]
    fn zero_coefficients_give_identity() {
        let g = GridSpec::centered(2.0, 32).unwrap();
        let plan = SpectralPlan::new(g);
        let r = solve_elliptic(&CoefficientPair::zero(g), &plan, 1e-10, 10).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.iterations(), 1);
        for (k, v) in r.solution.f.values().iter().enumerate() {
            assert_eq!(*v, g.point_at(k));
        }
        assert_eq!(r.regularity.positive_jacobian, 1.0);
    }

    #[test]
    fn disk_beltrami_coefficient() {
        let g = GridSpec::centered(2.0, 128).unwrap();
        let plan = SpectralPlan::new(g);
        let r = solve_elliptic(&disk_pair(g, 0.3), &plan, 1e-8, 100).unwrap();
        let bound = (real::ln(1e-8) / real::ln(0.3)).ceil() as usize + 2;
        assert!(r.iterations() <= bound, "{}", r.iterations());
        assert!(r.residual <= 1e-8 * 1.3 / 0.7, "{}", r.residual);
        for w in r.log.windows(2).skip(1) {
            assert!(w[1].1 <= (0.3 + 0.05) * w[0].1);
        }
        // away from the coefficient jump the quotient f_z̄/f_z is μ
        let h = g.spacing();
        for k in 0..g.len() {
            let z = g.point_at(k);
            if z.norm() < 1.0 - 4.0 * h {
                let q = r.solution.fzb.values()[k] / r.solution.fz.values()[k];
                assert!((q - 0.3).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn spectral_f_reproduces_omega() {
        let g = GridSpec::centered(2.0, 64).unwrap();
        let plan = SpectralPlan::new(g);
        let r = solve_elliptic(&disk_pair(g, 0.4), &plan, 1e-10, 200).unwrap();
        // ∂̄(Pω) = ω − m, and ∂̄(z + m z̄) = m
        let back = plan.dzb(&r.potential).map(|v| v + r.mean);
        let err = l2_norm(&back.sub(r.omega()).unwrap(), None) / l2_norm(r.omega(), None);
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn ellipticity_is_enforced() {
        let g = GridSpec::centered(2.0, 32).unwrap();
        let plan = SpectralPlan::new(g);
        let mu = ComplexField::from_fn(g, |z| Complex64::new(if z.norm() < 0.5 { 0.7 } else { 0.0 }, 0.0));
        let nu = mu.clone();
        let pair = CoefficientPair::new(mu, nu).unwrap();
        assert!(matches!(solve_elliptic(&pair, &plan, 1e-8, 50), Err(Error::Ellipticity { .. })));
    }

    #[test]
    fn budget_error_carries_log() {
        let g = GridSpec::centered(2.0, 32).unwrap();
        let plan = SpectralPlan::new(g);
        match solve_elliptic(&disk_pair(g, 0.5), &plan, 1e-14, 3) {
            Err(Error::IterationBudget { log }) => assert_eq!(log.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn regularity_of_conjugate_is_zero() {
        let g = GridSpec::centered(2.0, 64).unwrap();
        let plan = SpectralPlan::new(g);
        let pair = disk_pair(g, 0.3);
        let r = solve_elliptic(&pair, &plan, 1e-10, 100).unwrap();
        assert!(r.regularity.positive_jacobian == 1.0);
        let c = regularity_audit(&r.solution.conjugated(), &pair.dilatation(), None);
        assert_eq!(c.positive_jacobian, 0.0);
        let id = regularity_audit(&Solution::identity(g), &ScalarField::filled(g, 1.0), None);
        assert_eq!((id.positive_jacobian, id.bounded_ratio, id.derivative_chain), (1.0, 1.0, 1.0));
    }

    #[test]
    fn identity_and_affine_inequalities() {
        let g = GridSpec::centered(1.0, 32).unwrap();
        let region = Region::central(&g, 0.5).unwrap();
        let id = inequality_audit(&Solution::identity(g), &ScalarField::filled(g, 1.0), 1.0, region).unwrap();
        assert!(id.area_slack.abs() < 1e-12 && id.norm_slack.abs() < 1e-12);
        let a = Solution::affine(g, Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.0));
        let k = ScalarField::filled(g, 1.3 / 0.7);
        let r = inequality_audit(&a, &k, 1.0, region).unwrap();
        assert!(r.area_slack.abs() < 1e-10, "{}", r.area_slack);
        let cells = ((region.width() - 1) * (region.height() - 1)) as f64 * g.cell_area();
        assert!((r.image_area - 0.91 * cells).abs() < 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn folded_map_is_rejected() {
        let g = GridSpec::centered(1.0, 16).unwrap();
        let region = Region::full(&g);
        let s = Solution::identity(g).conjugated();
        assert!(matches!(
            inequality_audit(&s, &ScalarField::filled(g, 1.0), 1.0, region),
            Err(Error::NotInjective { .. })
        ));
    }

    #[test]
    fn contraction_certificate() {
        let g = GridSpec::centered(2.0, 32).unwrap();
        let plan = SpectralPlan::new(g);
        let pair = disk_pair(g, 0.3);
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut rnd = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..10 {
            let va: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(rnd(), rnd())).collect();
            let vb: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(rnd(), rnd())).collect();
            let a = ComplexField::new(g, va).unwrap();
            let b = ComplexField::new(g, vb).unwrap();
            let ta = contraction_step(&pair, &plan, &a).unwrap();
            let tb = contraction_step(&pair, &plan, &b).unwrap();
            let lhs = l2_norm(&ta.sub(&tb).unwrap(), None);
            let rhs = l2_norm(&a.sub(&b).unwrap(), None);
            assert!(lhs <= (0.3 + 1e-9) * rhs);
        }
    }

    #[test]
    fn translation_moves_the_potential() {
        let g = GridSpec::centered(3.0, 64).unwrap();
        let plan = SpectralPlan::new(g);
        let pair = disk_pair(g, 0.3).truncate(10.0).unwrap();
        let shifted = CoefficientPair::new(pair.mu().roll(3, -2), pair.nu().roll(3, -2)).unwrap();
        let a = solve_elliptic(&pair, &plan, 1e-12, 100).unwrap();
        let b = solve_elliptic(&shifted, &plan, 1e-12, 100).unwrap();
        let moved = a.potential.roll(3, -2);
        let err = l2_norm(&moved.sub(&b.potential).unwrap(), None) / l2_norm(&b.potential, None);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn fd_derivatives_of_f_track_spectral_ones() {
        let g = GridSpec::centered(2.0, 128).unwrap();
        let plan = SpectralPlan::new(g);
        let pair = CoefficientPair::new(
            ComplexField::from_fn(g, |z| Complex64::new(0.3 * real::exp(-16.0 * z.norm_sqr()), 0.0)),
            ComplexField::zeros(g),
        )
        .unwrap();
        let r = solve_elliptic(&pair, &plan, 1e-12, 100).unwrap();
        let (fz, _) = wirtinger_fd(&r.solution.f);
        let region = Region::central(&g, 0.5).unwrap();
        let err = l2_norm(&fz.sub(&r.solution.fz).unwrap(), Some(region)) / l2_norm(&r.solution.fz, Some(region));
        assert!(err < 1e-3, "{err}");
    }
}
