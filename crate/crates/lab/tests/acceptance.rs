//! Acceptance criteria. Each one prints a single PASS/FAIL line; the process
//! fails if any criterion does.

#[path = "support/lattice.rs"]
mod lattice;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use beltrami_core::admissibility::{witness_pipeline, PipelineOutcome};
use beltrami_core::coefficients::CoefficientPair;
use beltrami_core::grid::{l2_norm, l2_norm_masked, wirtinger_fd, ComplexField, GridSpec, Mask, Region, ScalarField};
use beltrami_core::growth::{classify, ConditionId, ConditionProbe, GrowthFunction, MethodChoice};
use beltrami_core::ladder::{LadderParams, Verdict};
use beltrami_core::radial::{
    annulus, dilatation_identity_error, gauge_fit, oracle_coefficient, oracle_map, RadialProfile,
};
use beltrami_core::solver::{
    contraction_step, default_caps, inequality_audit, off_circle, regularity_audit, solve_degenerate, solve_elliptic,
    Solution,
};
use beltrami_core::spectral::SpectralPlan;
use beltrami_core::Complex64;
use beltrami_lab::phi::PhiSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use lattice::SquareLattice;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

#[derive(Deserialize)]
struct Catalog {
    fixtures: Vec<Fixture>,
}

#[derive(Deserialize)]
struct Fixture {
    name: String,
    phi: PhiSpec,
    expected: String,
}

fn catalog() -> Vec<(String, GrowthFunction, Verdict)> {
    let c: Catalog = serde_json::from_str(include_str!("../fixtures/catalog.json")).expect("catalog parses");
    c.fixtures
        .into_iter()
        .map(|f| {
            let v = match f.expected.as_str() {
                "divergent" => Verdict::Divergent,
                "convergent" => Verdict::Convergent,
                other => panic!("unknown verdict {other}"),
            };
            (f.name, f.phi.build().expect("fixture builds"), v)
        })
        .collect()
}

fn disk(grid: GridSpec, value: f64) -> ComplexField {
    ComplexField::from_fn(grid, |z| Complex64::new(if z.norm() < 1.0 { value } else { 0.0 }, 0.0))
}

fn ulps(a: f64, b: f64, scale: f64) -> f64 {
    // distance in units of the last place of the coefficient magnitude
    let unit = f64::EPSILON * 2f64.powi(scale.log2().floor() as i32);
    if unit == 0.0 {
        0.0
    } else {
        (a - b).abs() / unit
    }
}

fn ac1() -> Check {
    let g = GridSpec::centered(2.0, 256).unwrap();
    let plan = SpectralPlan::new(g);
    let bump = ComplexField::from_fn(g, |z| {
        let w = z - Complex64::new(0.15, -0.1);
        Complex64::new(1.0, 0.4) * (-w.norm_sqr() / 0.05).exp() + z * (-z.norm_sqr() / 0.03).exp()
    });
    // per coefficient: ∂ applied to the P coefficients against the S coefficients
    let hat = plan.forward(&bump);
    let mut chained_hat = hat.clone();
    plan.cauchy_spectrum(&mut chained_hat);
    plan.dz_spectrum(&mut chained_hat);
    let mut direct_hat = hat;
    plan.beurling_spectrum(&mut direct_hat);
    let mut worst_ulp = 0.0f64;
    for (chained, direct) in chained_hat.iter().zip(&direct_hat) {
        let scale = direct.norm();
        if scale > 0.0 {
            worst_ulp = worst_ulp.max(ulps(chained.re, direct.re, scale)).max(ulps(chained.im, direct.im, scale));
        }
    }
    let p = plan.cauchy_transform(&bump).map_err(|e| e.to_string())?;
    let m = bump.mean();
    let target = bump.map(|v| v - m);
    let inv_err = l2_norm(&plan.dzb(&p).sub(&target).unwrap(), None) / l2_norm(&target, None);
    let s = plan.beurling_unchecked(&target);
    let iso = (l2_norm(&s, None) / l2_norm(&target, None) - 1.0).abs();
    ensure(
        worst_ulp <= 1.0 && inv_err <= 1e-8 && iso <= 1e-10,
        format!("max ulp {worst_ulp:.2}, dzb(Pg) rel err {inv_err:.2e}, |‖Sg‖/‖g‖ − 1| = {iso:.2e}"),
    )
}

fn ac2() -> Check {
    let g = GridSpec::centered(2.0, 512).unwrap();
    let plan = SpectralPlan::new(g);
    let chi = disk(g, 1.0);
    let area = chi.values().iter().filter(|v| v.re > 0.0).count() as f64 * g.cell_area();
    let lat = SquareLattice::new(g.side(), 80);
    let p = plan.cauchy_transform(&chi).map_err(|e| e.to_string())?;
    let s = plan.beurling_transform(&chi).map_err(|e| e.to_string())?;
    let h = g.spacing();
    let keep = Mask::from_fn(g, |z| (z.norm() - 1.0).abs() > 4.0 * h);
    let p_free = ComplexField::new(
        g,
        p.values().iter().enumerate().map(|(k, v)| v - lat.cauchy_correction(g.point_at(k), area)).collect(),
    )
    .unwrap();
    let s_free = ComplexField::new(
        g,
        s.values().iter().enumerate().map(|(k, v)| v - lat.beurling_correction(g.point_at(k))).collect(),
    )
    .unwrap();
    let p_exact = ComplexField::from_fn(g, |z| if z.norm() < 1.0 { z.conj() } else { 1.0 / z });
    let s_exact = ComplexField::from_fn(g, |z| if z.norm() < 1.0 { Complex64::new(0.0, 0.0) } else { -1.0 / (z * z) });
    let ep = l2_norm_masked(&p_free.sub(&p_exact).unwrap(), &keep) / l2_norm_masked(&p_exact, &keep);
    let es = l2_norm_masked(&s_free.sub(&s_exact).unwrap(), &keep) / l2_norm_masked(&s_exact, &keep);
    ensure(ep <= 0.05 && es <= 0.05, format!("P rel L2 err {ep:.3e}, S rel L2 err {es:.3e} off the 4-cell annulus"))
}

fn ac3() -> Check {
    let g = GridSpec::centered(2.0, 256).unwrap();
    let plan = SpectralPlan::new(g);
    let pair = CoefficientPair::new(disk(g, 0.3), ComplexField::zeros(g)).unwrap();
    let r = solve_elliptic(&pair, &plan, 1e-8, 100).map_err(|e| e.to_string())?;
    let bound = ((1e-8f64).ln() / 0.3f64.ln()).ceil() as usize + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut field = || {
            let v: Vec<Complex64> = (0..g.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let f = ComplexField::new(g, v).unwrap();
            let m = f.mean();
            f.map(|x| x - m)
        };
        let (a, b) = (field(), field());
        let ta = contraction_step(&pair, &plan, &a).unwrap();
        let tb = contraction_step(&pair, &plan, &b).unwrap();
        let q = l2_norm(&ta.sub(&tb).unwrap(), None) / l2_norm(&a.sub(&b).unwrap(), None);
        worst = worst.max(q);
    }
    ensure(
        r.residual <= 1e-6 && r.iterations() <= bound && bound == 18 && worst <= 0.3 + 1e-9,
        format!(
            "residual {:.2e}, {} iterations (bound {bound}), worst contraction ratio {worst:.12} over 100 pairs",
            r.residual,
            r.iterations()
        ),
    )
}

fn fd_residual(profile: &RadialProfile, n: usize) -> f64 {
    let g = GridSpec::centered(1.25, n).unwrap();
    let f = oracle_map(profile, &g).unwrap();
    let lambda = oracle_coefficient(profile, &g).unwrap();
    let (fz, fzb) = wirtinger_fd(&f);
    let res = lambda.residual(&fz, &fzb).unwrap();
    l2_norm_masked(&res, &annulus(&g, Complex64::new(0.0, 0.0), 0.15, 0.9))
}

fn ac4() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for profile in [RadialProfile::constant(2.0).unwrap(), RadialProfile::LogE] {
        let ratio = fd_residual(&profile, 256) / fd_residual(&profile, 512);
        let mut id = 0.0f64;
        for n in [256, 512] {
            id = id.max(dilatation_identity_error(&profile, &GridSpec::centered(1.25, n).unwrap()).unwrap());
        }
        ok &= ratio >= 1.8 && id <= 1e-12;
        parts.push(format!("{}: residual ratio {ratio:.3}, K identity err {id:.1e}", profile.name()));
    }
    ensure(ok, parts.join("; "))
}

fn ac5() -> Check {
    let g = GridSpec::centered(2.0, 512).unwrap();
    let plan = SpectralPlan::new(g);
    let profile = RadialProfile::LogE;
    let pair = oracle_coefficient(&profile, &g).map_err(|e| e.to_string())?.reduce();
    let ladder = solve_degenerate(&pair, &plan, &default_caps(), 1e-10, 500, 1e-3, None).map_err(|e| e.to_string())?;
    let f = &ladder.rungs.last().unwrap().1.solution.f;
    let exact = oracle_map(&profile, &g).unwrap();
    let (c, err) = gauge_fit(f, &exact, &annulus(&g, Complex64::new(0.0, 0.0), 0.15, 0.6)).unwrap();
    let monotone = ladder.gaps.windows(2).all(|w| w[1] <= w[0]);
    let gaps: Vec<String> = ladder.gaps.iter().map(|d| format!("{d:.2e}")).collect();
    ensure(
        err <= 0.05 && monotone,
        format!(
            "oracle rel L2 err {err:.3e} after scale {c:.4}; gaps [{}] non-increasing: {monotone}",
            gaps.join(", ")
        ),
    )
}

fn ac6() -> Check {
    let mut agree = 0;
    let mut total = 0;
    let mut misses = Vec::new();
    for (name, phi, expected) in catalog() {
        for id in ConditionId::ALL {
            for method in [MethodChoice::ClosedForm, MethodChoice::NumericLadder] {
                let probe = ConditionProbe::default_for(&phi, id).unwrap().with_method(method);
                let v = classify(&phi, &probe).map_err(|e| format!("{name} {}: {e}", id.label()))?;
                total += 1;
                if v.verdict == expected {
                    agree += 1;
                } else {
                    misses.push(format!("{name}/{}/{:?}={}", id.label(), method, v.verdict.label()));
                }
            }
        }
    }
    ensure(
        agree == total && total == 84,
        format!(
            "{agree}/{total} verdicts agree (7 fixtures x 6 conditions, closed form and ladder) {}",
            misses.join(" ")
        ),
    )
}

fn ac7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_exact = 0.0f64;
    let mut bad = Vec::new();
    for (name, phi, _) in catalog() {
        let t0 = phi.t0();
        for _ in 0..1000 {
            let t: f64 = rng.random_range(0.0..20.0);
            let v = phi.eval(t);
            if !v.is_finite() {
                continue;
            }
            let back = phi.inverse(v);
            if back > t {
                bad.push(format!("{name}: inverse overshoots at t = {t}"));
            }
            if t > t0 {
                worst_exact = worst_exact.max((back - t).abs() / t.max(1.0));
            }
        }
        for _ in 0..1000 {
            let a = 10f64.powf(rng.random_range(-3.0..6.0));
            let b = 10f64.powf(rng.random_range(-3.0..6.0));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            if phi.inverse(lo) > phi.inverse(hi) {
                bad.push(format!("{name}: inverse decreases between {lo} and {hi}"));
            }
        }
    }
    ensure(
        bad.is_empty() && worst_exact <= 1e-10,
        format!("{} violations, worst round trip at strict increase {worst_exact:.2e} {}", bad.len(), bad.join("; ")),
    )
}

fn ac8() -> Check {
    let g = GridSpec::centered(1.25, 512).unwrap();
    let q = ScalarField::from_fn(g, |z| (std::f64::consts::E / z.norm()).ln());
    let in_disk = Mask::from_fn(g, |z| z.norm() < 1.0);
    let o = Complex64::new(0.0, 0.0);
    let p = LadderParams::default();
    let exp = GrowthFunction::exponential(1.0).unwrap();
    let r = witness_pipeline(&q, &exp, Some(&in_disk), o, 1.0, &p).map_err(|e| e.to_string())?;
    let target = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    let rel = (r.area_integral - target).abs() / target;
    let mut alarms = Vec::new();
    for (name, phi, _) in catalog() {
        let rep = witness_pipeline(&q, &phi, Some(&in_disk), o, 1.0, &p).map_err(|e| e.to_string())?;
        if rep.outcome == PipelineOutcome::FalsificationAlarm {
            alarms.push(name);
        }
    }
    ensure(
        rel <= 0.02
            && r.condition_a.verdict == Verdict::Divergent
            && r.lehto.verdict == Verdict::Divergent
            && r.outcome == PipelineOutcome::Witnessed
            && alarms.is_empty(),
        format!(
            "area {:.4} (2πe {target:.4}, rel {rel:.2e}), A {}, Lehto {}, outcome {}, alarms {:?}",
            r.area_integral,
            r.condition_a.verdict.label(),
            r.lehto.verdict.label(),
            r.outcome.label(),
            alarms
        ),
    )
}

fn ac9() -> Check {
    let g = GridSpec::centered(2.0, 256).unwrap();
    let region = Region::central(&g, 0.5).unwrap();
    let one = ScalarField::filled(g, 1.0);
    let id = inequality_audit(&Solution::identity(g), &one, 1.0, region).map_err(|e| e.to_string())?;
    let aff = Solution::affine(g, Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.0));
    let k_aff = ScalarField::filled(g, 1.3 / 0.7);
    let af = inequality_audit(&aff, &k_aff, 1.0, region).map_err(|e| e.to_string())?;
    let plan = SpectralPlan::new(g);
    let pair = CoefficientPair::new(disk(g, 0.5), ComplexField::zeros(g)).unwrap();
    let sol = solve_elliptic(&pair, &plan, 1e-10, 200).map_err(|e| e.to_string())?;
    let el = inequality_audit(&sol.solution, &pair.dilatation(), 1.0, region).map_err(|e| e.to_string())?;
    ensure(
        id.holds() && af.holds() && el.holds() && af.area_slack.abs() <= 1e-10,
        format!(
            "slack (area, norm): identity ({:.1e}, {:.1e}), affine ({:.1e}, {:.3e}), k=0.5 solve ({:.2e}, {:.3e}); tolerance {:.1e}",
            id.area_slack, id.norm_slack, af.area_slack, af.norm_slack, el.area_slack, el.norm_slack, el.tolerance
        ),
    )
}

fn ac10() -> Check {
    let g = GridSpec::centered(2.0, 256).unwrap();
    let plan = SpectralPlan::new(g);
    let off = off_circle(&g, Complex64::new(0.0, 0.0), 1.0, 4.0 * g.spacing());
    let mut parts = Vec::new();
    let mut ok = true;
    for k in [0.3, 0.5, 0.8] {
        let pair = CoefficientPair::new(disk(g, k), ComplexField::zeros(g)).unwrap();
        let r = solve_elliptic(&pair, &plan, 1e-10, 400).map_err(|e| e.to_string())?;
        let kf = pair.dilatation();
        let pos = regularity_audit(&r.solution, &kf, Some(&off)).positive_jacobian;
        let neg = regularity_audit(&r.solution.conjugated(), &kf, Some(&off)).positive_jacobian;
        ok &= pos >= 0.999 && neg == 0.0;
        parts.push(format!("k={k}: J>0 on {:.3}% , conjugate {:.1}%", 100.0 * pos, 100.0 * neg));
    }
    ensure(ok, parts.join("; "))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 transform exactness", ac1),
        ("AC2 disk-indicator benchmarks", ac2),
        ("AC3 elliptic solve", ac3),
        ("AC4 radial oracle self-consistency", ac4),
        ("AC5 degenerate ladder vs oracle", ac5),
        ("AC6 condition equivalence suite", ac6),
        ("AC7 generalized inverse", ac7),
        ("AC8 averaging pipeline witness", ac8),
        ("AC9 inequality audits", ac9),
        ("AC10 regularity", ac10),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
