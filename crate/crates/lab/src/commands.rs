//! The four subcommands. Each returns the process exit code; `Err` means an
//! input error (exit 1).

use std::fs;
use std::path::{Path, PathBuf};

use beltrami_core::admissibility::{
    area_looks_finite, center_report, default_centers, AdmissibilityReport, CenterReport,
};
use beltrami_core::grid::{l2_norm_masked, wirtinger_fd, Region};
use beltrami_core::growth::{equivalence_harness, ConditionVerdict, EquivalenceReport};
use beltrami_core::radial::{
    annulus, dilatation_identity_error, gauge_fit, oracle_coefficient, oracle_derivatives, oracle_map,
};
use beltrami_core::solver::{
    inequality_audit, iterate_elliptic, ladder_from_rungs, LadderResult, RegularityReport, SolveResult,
};
use beltrami_core::spectral::SpectralPlan;
use beltrami_core::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{CoefficientSource, RunConfig, SolveMode};
use crate::error::{LabError, Result};
use crate::field_io::{write_atomic, write_field, write_solution};
use crate::json::{floats, num, pairs, to_string};
use crate::phi::{describe, describe_profile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DISAGREEMENT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Inner and outer radius of the annulus used to compare against the radial
/// oracle after a solve.
pub const ORACLE_ANNULUS: (f64, f64) = (0.15, 0.6);

/// Annulus of the reduced-equation residual summary.
pub const RESIDUAL_ANNULUS: (f64, f64) = (0.15, 0.9);

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.resolve(&cfg.output.dir);
    fs::create_dir_all(&dir).map_err(LabError::io(&dir))?;
    Ok(dir)
}

fn emit(dir: &Path, name: &str, v: &Value) -> Result<()> {
    write_atomic(&dir.join(name), to_string(v).as_bytes())
}

fn manifest(cfg: &RunConfig, command: &str, results: &Value) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.seed,
        "config": serde_json::to_value(cfg).unwrap_or(Value::Null),
        "results": results,
    })
}

fn verdict_json(v: &ConditionVerdict) -> Value {
    json!({
        "condition": v.id.label(),
        "verdict": v.verdict.label(),
        "method": v.method.label(),
        "evidence": pairs(&v.evidence),
    })
}

pub fn harness_json(phi: &beltrami_core::growth::GrowthFunction, rep: &EquivalenceReport) -> Value {
    json!({
        "phi": describe(phi),
        "convex": rep.convex,
        "absolutely_continuous": rep.absolutely_continuous,
        "closed_form": rep.closed_form.as_ref().map(|v| v.iter().map(verdict_json).collect::<Vec<_>>()),
        "numeric": rep.numeric.iter().map(verdict_json).collect::<Vec<_>>(),
        "failures": rep.failures.iter().map(|d| json!({
            "left": d.left.label(),
            "right": d.right.label(),
            "method": d.method.label(),
        })).collect::<Vec<_>>(),
        "ladder_mismatches": rep.ladder_mismatches.iter().map(|c| c.label()).collect::<Vec<_>>(),
        "note": rep.note,
        "consistent": rep.passed(),
    })
}

/// Classify the six conditions for the configured `Φ`. Exit 2 when a convex
/// family shows a disagreement.
pub fn check_phi(cfg: &RunConfig) -> Result<i32> {
    let phi = cfg.phi()?;
    let rep = equivalence_harness(&phi, &cfg.admissibility.ladder())?;
    let body = harness_json(&phi, &rep);
    let dir = out_dir(cfg)?;
    emit(&dir, "report.json", &body)?;
    emit(&dir, "manifest.json", &manifest(cfg, "check-phi", &json!({ "consistent": rep.passed() })))?;
    Ok(if rep.convex && !rep.passed() { EXIT_DISAGREEMENT } else { EXIT_OK })
}

fn center_json(c: &CenterReport) -> Value {
    json!({
        "z0": [num(c.center.re), num(c.center.im)],
        "delta": num(c.delta),
        "verdict": c.lehto.verdict.label(),
        "evidence": pairs(&c.lehto.evidence),
    })
}

pub fn admissibility_json(rep: &AdmissibilityReport, weight: &str) -> Value {
    json!({
        "area_integral": num(rep.area_integral),
        "area_finite": rep.area_finite,
        "weight": weight,
        "phi": describe(&rep.phi),
        "centers": rep.centers.iter().map(center_json).collect::<Vec<_>>(),
        "conclusion": rep.conclusion.label(),
    })
}

/// Admissibility evidence for the dilatation of the configured coefficients.
/// Centers run in parallel.
pub fn check_field(cfg: &RunConfig) -> Result<i32> {
    let phi = cfg.phi()?;
    let k = cfg.coefficients()?.dilatation();
    let a = &cfg.admissibility;
    let mut centers = if a.lattice { default_centers(k.grid()) } else { Vec::new() };
    centers.extend(a.centers.iter().map(|c| Complex64::new(c[0], c[1])));
    if centers.is_empty() {
        return Err(LabError::input("no admissibility centers: enable the lattice or list centers"));
    }
    let params = a.ladder();
    let reports =
        centers.par_iter().map(|z| center_report(&k, *z, &params)).collect::<std::result::Result<Vec<_>, _>>()?;
    let weight = a.weight.weight();
    let area = area_looks_finite(&k, &phi, weight, None);
    let rep = AdmissibilityReport::assemble(area, weight, phi, reports);
    let body = admissibility_json(&rep, a.weight.label());
    let dir = out_dir(cfg)?;
    emit(&dir, "report.json", &body)?;
    emit(&dir, "manifest.json", &manifest(cfg, "check-field", &json!({ "conclusion": rep.conclusion.label() })))?;
    Ok(EXIT_OK)
}

fn regularity_json(r: &RegularityReport) -> Value {
    json!({
        "cells": r.cells,
        "eps_j": num(r.eps_j),
        "positive_jacobian": num(r.positive_jacobian),
        "bounded_ratio": num(r.bounded_ratio),
        "derivative_chain": num(r.derivative_chain),
    })
}

fn ladder_json(l: &LadderResult) -> Value {
    let caps: Vec<f64> = l.rungs.iter().map(|r| r.0).collect();
    json!({
        "caps": floats(&caps),
        "gaps": floats(&l.gaps),
        "gap_tol": num(l.gap_tol),
        "non_increasing": l.gaps.windows(2).all(|w| w[1] <= w[0]),
        "rung_iterations": l.rungs.iter().map(|r| r.1.iterations()).collect::<Vec<_>>(),
        "converged": l.converged,
    })
}

/// Solve in elliptic or ladder mode and write the fields. Exit 3 when the
/// iteration or the ladder did not converge; the fields are written anyway.
pub fn solve(cfg: &RunConfig) -> Result<i32> {
    let pair = cfg.coefficients()?;
    let grid = *pair.grid();
    let plan = SpectralPlan::new(grid);
    let s = &cfg.solver;
    let mode = match s.mode {
        SolveMode::Auto if pair.degenerate_mask().is_empty() && pair.sup_ellipticity() < 1.0 => SolveMode::Elliptic,
        SolveMode::Auto => SolveMode::Degenerate,
        m => m,
    };
    let (result, ladder, k_field): (SolveResult, Option<LadderResult>, _) = match mode {
        SolveMode::Degenerate => {
            let rungs = s
                .caps
                .par_iter()
                .map(|&n| {
                    let truncated = pair.truncate(n)?;
                    Ok((n, iterate_elliptic(&truncated, &plan, s.tol, s.max_iter)?))
                })
                .collect::<std::result::Result<Vec<_>, beltrami_core::Error>>()?;
            let top = *s.caps.last().expect("validated caps");
            let ladder = ladder_from_rungs(rungs, Region::central(&grid, 0.5)?, s.gap_tol)?;
            let last = ladder.rungs.last().expect("at least one rung").1.clone();
            (last, Some(ladder), pair.truncate(top)?.dilatation())
        }
        _ => (iterate_elliptic(&pair, &plan, s.tol, s.max_iter)?, None, pair.dilatation()),
    };
    let dir = out_dir(cfg)?;
    let sol = &result.solution;
    write_field(&dir.join("f.csv"), &sol.f)?;
    write_field(&dir.join("fz.csv"), &sol.fz)?;
    write_field(&dir.join("fzb.csv"), &sol.fzb)?;
    write_solution(&dir.join("solution.csv"), sol)?;

    let inequality = match inequality_audit(sol, &k_field, s.audit_p, Region::central(&grid, 0.5)?) {
        Ok(a) => json!({
            "p": num(a.p),
            "s": num(a.s),
            "image_area": num(a.image_area),
            "jacobian_integral": num(a.jacobian_integral),
            "area_slack": num(a.area_slack),
            "derivative_norm": num(a.derivative_norm),
            "norm_bound": num(a.norm_bound),
            "norm_slack": num(a.norm_slack),
            "tolerance": num(a.tolerance),
            "holds": a.holds(),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let oracle = match &cfg.coefficients {
        CoefficientSource::Radial { profile } => {
            let exact = oracle_map(&profile.build()?, &grid)?;
            let mask = annulus(&grid, grid.center(), ORACLE_ANNULUS.0, ORACLE_ANNULUS.1);
            let (scale, err) = gauge_fit(&sol.f, &exact, &mask)?;
            json!({ "annulus": [num(ORACLE_ANNULUS.0), num(ORACLE_ANNULUS.1)], "scale": num(scale), "relative_l2": num(err) })
        }
        _ => Value::Null,
    };
    let converged = result.converged && ladder.as_ref().is_none_or(|l| l.converged);
    let results = json!({
        "mode": if mode == SolveMode::Degenerate { "degenerate" } else { "elliptic" },
        "tol": num(s.tol),
        "max_iter": s.max_iter,
        "iterations": result.iterations(),
        "update_log": pairs(&result.log.iter().map(|(i, u)| (*i as f64, *u)).collect::<Vec<_>>()),
        "residual": num(result.residual),
        "contraction": num(result.contraction),
        "regularity": regularity_json(&result.regularity),
        "ladder": ladder.as_ref().map(ladder_json),
        "inequality": inequality,
        "oracle": oracle,
        "converged": converged,
    });
    emit(&dir, "report.json", &results)?;
    emit(&dir, "manifest.json", &manifest(cfg, "solve", &results))?;
    Ok(if converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Sample the radial oracle: map, derivatives, coefficient and the checks.
pub fn oracle(cfg: &RunConfig) -> Result<i32> {
    let profile = cfg.profile()?;
    let grid = cfg.grid()?;
    let f = oracle_map(&profile, &grid)?;
    let (fz, fzb) = oracle_derivatives(&profile, &grid)?;
    let coef = oracle_coefficient(&profile, &grid)?;
    let identity_error = dilatation_identity_error(&profile, &grid)?;
    let (fd_z, fd_zb) = wirtinger_fd(&f);
    let res = coef.residual(&fd_z, &fd_zb)?;
    let mask = annulus(&grid, grid.center(), RESIDUAL_ANNULUS.0, RESIDUAL_ANNULUS.1);
    let abs = l2_norm_masked(&res, &mask);
    let scale = l2_norm_masked(&fd_z, &mask);
    let dir = out_dir(cfg)?;
    write_field(&dir.join("f.csv"), &f)?;
    write_field(&dir.join("fz.csv"), &fz)?;
    write_field(&dir.join("fzb.csv"), &fzb)?;
    write_field(&dir.join("lambda.csv"), &coef.lambda)?;
    let results = json!({
        "profile": describe_profile(&profile),
        "spacing": num(grid.spacing()),
        "identity_error": num(identity_error),
        "identity_pass": identity_error <= 1e-12,
        "residual": {
            "annulus": [num(RESIDUAL_ANNULUS.0), num(RESIDUAL_ANNULUS.1)],
            "l2": num(abs),
            "relative_l2": num(if scale > 0.0 { abs / scale } else { 0.0 }),
        },
    });
    emit(&dir, "report.json", &results)?;
    emit(&dir, "manifest.json", &manifest(cfg, "oracle", &results))?;
    Ok(EXIT_OK)
}
