use beltrami_core::coefficients::CoefficientPair;
use beltrami_core::grid::{l2_norm, ComplexField, GridSpec, Region, ScalarField};
use beltrami_core::solver::{inequality_audit, regularity_audit, solve_degenerate, solve_elliptic};
use beltrami_core::spectral::SpectralPlan;
use beltrami_core::Complex64;

fn smooth_pair(grid: GridSpec, k: f64) -> CoefficientPair {
    let mu = ComplexField::from_fn(grid, |z| Complex64::new(k * (-16.0 * z.norm_sqr()).exp(), 0.0));
    let nu = ComplexField::from_fn(grid, |z| Complex64::new(0.0, 0.5 * k * (-16.0 * z.norm_sqr()).exp()) * z.norm());
    CoefficientPair::new(mu, nu).unwrap()
}

#[test]
fn second_type_equation_flows_through_the_general_solver() {
    let g = GridSpec::centered(2.0, 64).unwrap();
    let plan = SpectralPlan::new(g);
    let nu = ComplexField::from_fn(g, |z| Complex64::new(if z.norm() < 0.8 { 0.4 } else { 0.0 }, 0.0));
    let r = solve_elliptic(&CoefficientPair::second_type(nu.clone()), &plan, 1e-10, 100).unwrap();
    let lhs = r.solution.fzb.clone();
    let rhs = r.solution.fz.zip_with(&nu, |fz, n| n * fz.conj()).unwrap();
    assert!(l2_norm(&lhs.sub(&rhs).unwrap(), None) <= 1e-9 * l2_norm(&lhs, None));
}

#[test]
fn elliptic_solution_passes_both_audits() {
    let g = GridSpec::centered(2.0, 128).unwrap();
    let plan = SpectralPlan::new(g);
    let pair = smooth_pair(g, 0.5);
    let r = solve_elliptic(&pair, &plan, 1e-10, 200).unwrap();
    assert_eq!(r.regularity.positive_jacobian, 1.0);
    let audit = inequality_audit(&r.solution, &pair.dilatation(), 1.0, Region::central(&g, 0.5).unwrap()).unwrap();
    assert!(audit.holds(), "{audit:?}");
    let again = regularity_audit(&r.solution, &pair.dilatation(), None);
    assert_eq!(again, r.regularity);
}

#[test]
fn ladder_of_elliptic_pair_is_flat() {
    let g = GridSpec::centered(2.0, 64).unwrap();
    let plan = SpectralPlan::new(g);
    let pair = smooth_pair(g, 0.3);
    let ladder = solve_degenerate(&pair, &plan, &[4.0, 8.0, 16.0], 1e-10, 100, 1e-6, None).unwrap();
    assert!(ladder.converged);
    assert!(ladder.gaps.iter().all(|g| *g == 0.0));
}

#[test]
fn dilatation_field_is_consistent() {
    let g = GridSpec::centered(2.0, 32).unwrap();
    let pair = smooth_pair(g, 0.5);
    let k = pair.dilatation();
    let s = pair.ellipticity();
    for (kk, ss) in k.values().iter().zip(s.values()) {
        assert!((kk - (1.0 + ss) / (1.0 - ss)).abs() < 1e-12 * kk);
    }
    let one = ScalarField::filled(g, 1.0);
    assert!(k.values().iter().zip(one.values()).all(|(a, b)| a >= b));
}
