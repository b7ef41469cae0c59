//! Radial solutions `f(z) = (z/|z|)·ρ(|z|)` of the reduced equation
//! `f_z̄ = λ·Re f_z` with `λ(z) = −(z/z̄)·(K(|z|)−1)/(K(|z|)+1)`.
//!
//! The profile `K` lives on `(0, 1]` and is extended by `K = 1` outside the
//! unit disk, so `λ` is supported in the disk and `f = z` beyond it. The
//! stretch is `ρ(t) = exp(−∫_t^1 dr/(r K(r)))`: the gauge is `ρ(1) = 1`
//! rather than a lower limit at `0`, where the integral diverges for
//! admissible profiles.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::coefficients::{dilatation_from_sum, ReducedCoefficient, ReducedVariant};
use crate::grid::{ComplexField, GridSpec, Mask, ScalarField};
use crate::quad::adaptive_simpson;
use crate::real;
use crate::sum::pairwise_sum_by;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `K ≡ k`.
    Constant(f64),
    /// `K(r) = log(e/r) = 1 − log r`.
    LogE,
    /// `K(r) = scale·r^{−exponent}`.
    Power { scale: f64, exponent: f64 },
    /// Samples `(r, K)` on `(0, 1]`, linear in `r`, held outside the range.
    Tabulated(Vec<(f64, f64)>),
}

impl RadialProfile {
    pub fn constant(k: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 1.0) {
            return Err(Error::InvalidParameter("constant dilatation must be finite and ≥ 1"));
        }
        Ok(RadialProfile::Constant(k))
    }

    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale.is_finite() && scale >= 1.0 && exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidParameter("power profile needs scale ≥ 1 and exponent > 0"));
        }
        Ok(RadialProfile::Power { scale, exponent })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("at least one sample is required"));
        }
        for (i, &(r, k)) in samples.iter().enumerate() {
            if !(r > 0.0 && r <= 1.0 && k.is_finite() && k >= 1.0) {
                return Err(Error::InvalidParameter("samples need r in (0, 1] and finite K ≥ 1"));
            }
            if i > 0 && r <= samples[i - 1].0 {
                return Err(Error::InvalidParameter("sample radii must increase strictly"));
            }
        }
        Ok(RadialProfile::Tabulated(samples))
    }

    pub fn name(&self) -> &'static str {
        match self {
            RadialProfile::Constant(_) => "constant",
            RadialProfile::LogE => "log-e",
            RadialProfile::Power { .. } => "power",
            RadialProfile::Tabulated(_) => "tabulated",
        }
    }

    /// `K(r)`, with `K = 1` for `r > 1`.
    pub fn dilatation(&self, r: f64) -> f64 {
        if r > 1.0 {
            return 1.0;
        }
        match self {
            RadialProfile::Constant(k) => *k,
            RadialProfile::LogE => 1.0 - real::ln(r),
            RadialProfile::Power { scale, exponent } => scale * real::powf(r, -exponent),
            RadialProfile::Tabulated(s) => {
                let n = s.len();
                if r <= s[0].0 {
                    return s[0].1;
                }
                if r >= s[n - 1].0 {
                    return s[n - 1].1;
                }
                let i = s.partition_point(|p| p.0 <= r) - 1;
                let (ra, ka) = s[i];
                let (rb, kb) = s[i + 1];
                ka + (r - ra) / (rb - ra) * (kb - ka)
            }
        }
    }

    /// `log ρ(t) = −∫_t^1 dr/(r K(r))` for `t ≤ 1`, `log t` beyond.
    pub fn log_rho(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if t >= 1.0 {
            return real::ln(t);
        }
        match self {
            RadialProfile::Constant(k) => real::ln(t) / k,
            // ∫_t^1 dr/(r(1 − log r)) = log(1 − log t)
            RadialProfile::LogE => -real::ln(1.0 - real::ln(t)),
            // ∫_t^1 r^{a−1}/c dr = (1 − t^a)/(a c)
            RadialProfile::Power { scale, exponent } => -(1.0 - real::powf(t, *exponent)) / (exponent * scale),
            RadialProfile::Tabulated(s) => {
                // in u = log r the integrand is 1/K(e^u)
                let mut pts: Vec<f64> =
                    s.iter().map(|p| real::ln(p.0)).filter(|u| *u > real::ln(t) && *u < 0.0).collect();
                pts.insert(0, real::ln(t));
                pts.push(0.0);
                let f = |u: f64| 1.0 / self.dilatation(real::exp(u));
                -pts.windows(2).map(|w| adaptive_simpson(&f, w[0], w[1], 1e-13)).sum::<f64>()
            }
        }
    }

    pub fn rho(&self, t: f64) -> f64 {
        real::exp(self.log_rho(t))
    }

    /// `∫_a^b dr/(r K(r))` by quadrature in `log r`, independent of the
    /// closed forms in [`log_rho`](Self::log_rho).
    pub fn integral_by_quadrature(&self, a: f64, b: f64) -> f64 {
        let f = |u: f64| 1.0 / self.dilatation(real::exp(u));
        adaptive_simpson(&f, real::ln(a), real::ln(b), 1e-14)
    }
}

fn nonzero_radius(grid: &GridSpec) -> Result<()> {
    if (0..grid.len()).any(|k| grid.point_at(k).norm() == 0.0) {
        return Err(Error::InvalidGrid("a node sits at the origin"));
    }
    Ok(())
}

fn sample<T>(grid: &GridSpec, f: impl Fn(Complex64) -> T) -> Result<Vec<T>> {
    nonzero_radius(grid)?;
    Ok((0..grid.len()).map(|k| f(grid.point_at(k))).collect())
}

/// `f(z) = (z/|z|)·ρ(|z|)`.
pub fn oracle_map(profile: &RadialProfile, grid: &GridSpec) -> Result<ComplexField> {
    let v = sample(grid, |z| {
        let r = z.norm();
        z * (profile.rho(r) / r)
    })?;
    ComplexField::new(*grid, v)
}

/// `λ(z) = −(z/z̄)·(K−1)/(K+1)`, as a reduced `Re`-type coefficient.
pub fn oracle_coefficient(profile: &RadialProfile, grid: &GridSpec) -> Result<ReducedCoefficient> {
    let v = sample(grid, |z| {
        let k = profile.dilatation(z.norm());
        -(z / z.conj()) * ((k - 1.0) / (k + 1.0))
    })?;
    Ok(ReducedCoefficient::new(ComplexField::new(*grid, v)?, ReducedVariant::Re))
}

/// `(f_z, f_z̄) = ((ρ/2r)(1+K)/K, (z/z̄)(ρ/2r)(1−K)/K)`.
pub fn oracle_derivatives(profile: &RadialProfile, grid: &GridSpec) -> Result<(ComplexField, ComplexField)> {
    let v = sample(grid, |z| {
        let r = z.norm();
        let k = profile.dilatation(r);
        let a = profile.rho(r) / (2.0 * r);
        let fz = Complex64::new(a * (1.0 + k) / k, 0.0);
        let fzb = (z / z.conj()) * (a * (1.0 - k) / k);
        (fz, fzb)
    })?;
    let (fz, fzb): (Vec<_>, Vec<_>) = v.into_iter().unzip();
    Ok((ComplexField::new(*grid, fz)?, ComplexField::new(*grid, fzb)?))
}

/// `J = ρ²/(r² K)`.
pub fn oracle_jacobian(profile: &RadialProfile, grid: &GridSpec) -> Result<ScalarField> {
    let v = sample(grid, |z| {
        let r = z.norm();
        let rho = profile.rho(r);
        rho * rho / (r * r * profile.dilatation(r))
    })?;
    ScalarField::new(*grid, v)
}

/// `K(|z|)` sampled on the grid.
pub fn oracle_dilatation(profile: &RadialProfile, grid: &GridSpec) -> ScalarField {
    ScalarField::from_fn(*grid, |z| profile.dilatation(z.norm()))
}

/// Largest relative deviation of `K_λ` from `K(|z|)` over the grid.
pub fn dilatation_identity_error(profile: &RadialProfile, grid: &GridSpec) -> Result<f64> {
    let lambda = oracle_coefficient(profile, grid)?;
    let mut worst = 0.0f64;
    for (k, l) in lambda.lambda.values().iter().enumerate() {
        let expect = profile.dilatation(grid.point_at(k).norm());
        let got = dilatation_from_sum(l.norm());
        worst = worst.max((got - expect).abs() / expect);
    }
    Ok(worst)
}

/// Nodes with `lo ≤ |z − center| ≤ hi`.
pub fn annulus(grid: &GridSpec, center: Complex64, lo: f64, hi: f64) -> Mask {
    Mask::from_fn(*grid, |z| {
        let r = (z - center).norm();
        r >= lo && r <= hi
    })
}

/// Least-squares real scale `c` minimising `‖f − c·g‖` on `mask`, and the
/// relative error `‖f − c·g‖/‖f‖` there.
pub fn gauge_fit(f: &ComplexField, g: &ComplexField, mask: &Mask) -> Result<(f64, f64)> {
    f.same_grid(g)?;
    let n = f.values().len();
    let (fv, gv, m) = (f.values(), g.values(), mask.values());
    let pick = |k: usize, x: f64| if m[k] { x } else { 0.0 };
    let fg = pairwise_sum_by(n, &|k| pick(k, (gv[k].conj() * fv[k]).re));
    let gg = pairwise_sum_by(n, &|k| pick(k, gv[k].norm_sqr()));
    let ff = pairwise_sum_by(n, &|k| pick(k, fv[k].norm_sqr()));
    if gg == 0.0 || ff == 0.0 {
        return Err(Error::InvalidParameter("empty fitting region"));
    }
    let c = fg / gg;
    let err = pairwise_sum_by(n, &|k| pick(k, (fv[k] - gv[k] * c).norm_sqr()));
    Ok((c, real::sqrt(err / ff)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{l2_norm_masked, wirtinger_fd};

    fn grid(n: usize) -> GridSpec {
        GridSpec::centered(1.25, n).unwrap()
    }

    #[test]
    fn unit_profile_is_identity() {
        let g = grid(32);
        let p = RadialProfile::constant(1.0).unwrap();
        let f = oracle_map(&p, &g).unwrap();
        for (k, v) in f.values().iter().enumerate() {
            assert!((v - g.point_at(k)).norm() < 1e-15);
        }
        let l = oracle_coefficient(&p, &g).unwrap();
        assert!(l.lambda.values().iter().all(|v| v.norm() == 0.0));
        let (fz, fzb) = oracle_derivatives(&p, &g).unwrap();
        assert!(fz.values().iter().all(|v| (v - 1.0).norm() < 1e-15));
        assert!(fzb.values().iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn constant_two_is_radial_stretch() {
        let p = RadialProfile::constant(2.0).unwrap();
        for t in [0.01, 0.3, 0.9] {
            assert!((p.rho(t) - real::sqrt(t)).abs() < 1e-15);
        }
        // f_z = 3/4, |f_z̄| = 1/4 at r = 1⁻
        let r = 1.0 - 1e-15;
        let a = p.rho(r) / (2.0 * r);
        assert!((a * 1.5 - 0.75).abs() < 1e-12);
        assert!((a * 0.5 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn coefficient_values() {
        let g = GridSpec::new(Complex64::new(1.0, 0.0), 0.5, 16).unwrap();
        let p = RadialProfile::constant(2.0).unwrap();
        // λ at z real is −(K−1)/(K+1) = −1/3 inside; just outside, 0
        let z = Complex64::new(0.99, 0.0);
        let k = p.dilatation(z.norm());
        let lam = -(z / z.conj()) * ((k - 1.0) / (k + 1.0));
        assert!((lam - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-15);
        let l = oracle_coefficient(&RadialProfile::LogE, &g).unwrap();
        for (i, v) in l.lambda.values().iter().enumerate() {
            let z = g.point_at(i);
            let k = RadialProfile::LogE.dilatation(z.norm());
            assert!((v.norm() - (k - 1.0) / (k + 1.0)).abs() < 1e-15);
        }
        // K(e^{−1}) = 2
        assert!((RadialProfile::LogE.dilatation(real::exp(-1.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let profiles = [
            RadialProfile::constant(2.0).unwrap(),
            RadialProfile::LogE,
            RadialProfile::power(3.0, 0.5).unwrap(),
            RadialProfile::tabulated((1..=50).map(|i| (i as f64 / 50.0, 1.0 + 0.1 * i as f64)).collect()).unwrap(),
        ];
        for p in &profiles {
            for t in [1e-3, 0.05, 0.4, 0.99] {
                let q = p.integral_by_quadrature(t, 1.0);
                assert!((p.log_rho(t) + q).abs() < 1e-10, "{} at {t}", p.name());
            }
        }
    }

    #[test]
    fn rho_is_monotone_and_above_identity_inside() {
        // log ρ(t) = −∫_t^1 dr/(rK) ≥ −∫_t^1 dr/r = log t when K ≥ 1
        for p in [RadialProfile::constant(3.0).unwrap(), RadialProfile::LogE, RadialProfile::power(1.0, 0.5).unwrap()] {
            let mut prev = 0.0;
            for k in 1..=100 {
                let t = k as f64 / 100.0;
                let r = p.rho(t);
                assert!(r >= t * (1.0 - 1e-15) && r >= prev, "{}", p.name());
                prev = r;
            }
        }
    }

    #[test]
    fn derivatives_satisfy_reduced_equation_exactly() {
        let g = grid(64);
        for p in [RadialProfile::constant(2.0).unwrap(), RadialProfile::LogE, RadialProfile::power(2.0, 0.3).unwrap()] {
            let (fz, fzb) = oracle_derivatives(&p, &g).unwrap();
            let lam = oracle_coefficient(&p, &g).unwrap();
            let res = lam.residual(&fz, &fzb).unwrap();
            for (k, v) in res.values().iter().enumerate() {
                assert!(v.norm() <= 1e-14 * fz.values()[k].norm(), "{}", p.name());
                assert!(fz.values()[k].re > 0.0 && fz.values()[k].im == 0.0);
            }
            let j = oracle_jacobian(&p, &g).unwrap();
            let direct = crate::grid::jacobian(&fz, &fzb).unwrap();
            for (a, b) in j.values().iter().zip(direct.values()) {
                assert!(*a > 0.0 && (a - b).abs() <= 1e-12 * a);
            }
        }
    }

    #[test]
    fn identity_holds_to_rounding() {
        for p in [RadialProfile::constant(2.0).unwrap(), RadialProfile::LogE] {
            assert!(dilatation_identity_error(&p, &grid(64)).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn fd_derivatives_match_closed_forms() {
        let g = grid(256);
        let p = RadialProfile::LogE;
        let f = oracle_map(&p, &g).unwrap();
        let (fz, fzb) = wirtinger_fd(&f);
        let (ez, ezb) = oracle_derivatives(&p, &g).unwrap();
        let ring = annulus(&g, Complex64::new(0.0, 0.0), 0.15, 0.9);
        let rel = l2_norm_masked(&fz.sub(&ez).unwrap(), &ring) / l2_norm_masked(&ez, &ring);
        assert!(rel < 1e-3, "{rel}");
        let rel = l2_norm_masked(&fzb.sub(&ezb).unwrap(), &ring) / l2_norm_masked(&ezb, &ring);
        assert!(rel < 1e-2, "{rel}");
    }

    #[test]
    fn gauge_fit_recovers_scale() {
        let g = grid(32);
        let f = oracle_map(&RadialProfile::LogE, &g).unwrap();
        let ring = annulus(&g, Complex64::new(0.0, 0.0), 0.15, 0.6);
        let (c, err) = gauge_fit(&f.scale(Complex64::new(1.7, 0.0)), &f, &ring).unwrap();
        assert!((c - 1.7).abs() < 1e-14 && err < 1e-14);
    }

    #[test]
    fn origin_node_is_rejected() {
        let g = GridSpec::new(Complex64::new(0.0625, 0.0625), 1.0, 16).unwrap();
        assert!(oracle_map(&RadialProfile::LogE, &g).is_err());
    }
}
