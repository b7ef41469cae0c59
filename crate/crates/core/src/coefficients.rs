//! Coefficient pairs `(μ, ν)`, dilatations, reductions of special equation
//! forms to the two-characteristic form, and the truncation ladder.

use num_complex::Complex64;

use crate::grid::{ComplexField, GridSpec, Mask, ScalarField};
use crate::{Error, Result};

/// Default ellipticity margin: cells with `|μ|+|ν| ≥ 1 − ε` are degenerate.
pub const DEFAULT_ELLIPTICITY_MARGIN: f64 = 1e-9;

/// `(1+s)/(1−s)` for `s = |μ|+|ν|`; `+∞` at or beyond `s = 1`.
#[inline]
pub fn dilatation_from_sum(s: f64) -> f64 {
    if s >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + s) / (1.0 - s)
    }
}

/// Inverse of [`dilatation_from_sum`]: `(K−1)/(K+1)`.
#[inline]
pub fn sum_from_dilatation(k: f64) -> f64 {
    if k.is_infinite() {
        1.0
    } else {
        (k - 1.0) / (k + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPair {
    mu: ComplexField,
    nu: ComplexField,
    degenerate: Mask,
    margin: f64,
}

impl CoefficientPair {
    pub fn new(mu: ComplexField, nu: ComplexField) -> Result<Self> {
        Self::with_margin(mu, nu, DEFAULT_ELLIPTICITY_MARGIN)
    }

    pub fn with_margin(mu: ComplexField, nu: ComplexField, margin: f64) -> Result<Self> {
        mu.same_grid(&nu)?;
        if !(0.0..1.0).contains(&margin) {
            return Err(Error::InvalidParameter("ellipticity margin must lie in [0, 1)"));
        }
        let degenerate = Mask::from_raw(
            *mu.grid(),
            mu.values().iter().zip(nu.values()).map(|(a, b)| a.norm() + b.norm() >= 1.0 - margin).collect(),
        );
        Ok(CoefficientPair { mu, nu, degenerate, margin })
    }

    /// `(0, 0)`: the Cauchy–Riemann system.
    pub fn zero(grid: GridSpec) -> Self {
        Self::new(ComplexField::zeros(grid), ComplexField::zeros(grid)).expect("same grid")
    }

    /// Equation of the second type `f_z̄ = ν·conj(f_z)`.
    pub fn second_type(nu: ComplexField) -> Self {
        let mu = ComplexField::zeros(*nu.grid());
        Self::new(mu, nu).expect("same grid")
    }

    pub fn grid(&self) -> &GridSpec {
        self.mu.grid()
    }

    pub fn mu(&self) -> &ComplexField {
        &self.mu
    }

    pub fn nu(&self) -> &ComplexField {
        &self.nu
    }

    pub fn degenerate_mask(&self) -> &Mask {
        &self.degenerate
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// `|μ|+|ν|` at each node.
    pub fn ellipticity(&self) -> ScalarField {
        ScalarField::from_raw(
            *self.grid(),
            self.mu.values().iter().zip(self.nu.values()).map(|(a, b)| a.norm() + b.norm()).collect(),
        )
    }

    /// `sup(|μ|+|ν|)` over all nodes.
    pub fn sup_ellipticity(&self) -> f64 {
        self.ellipticity().max()
    }

    /// `K_{μ,ν} = (1+|μ|+|ν|)/(1−|μ|−|ν|)`; masked cells are `+∞`.
    pub fn dilatation(&self) -> ScalarField {
        let e = self.ellipticity();
        ScalarField::from_raw(
            *self.grid(),
            e.values()
                .iter()
                .enumerate()
                .map(|(k, &s)| if self.degenerate.get(k) { f64::INFINITY } else { dilatation_from_sum(s) })
                .collect(),
        )
    }

    /// Clip the dilatation at `n`: wherever `K > n`, scale `μ` and `ν` by
    /// the positive factor `((n−1)/(n+1))/(|μ|+|ν|)`. Phases and the ratio
    /// `μ : ν` are preserved.
    pub fn truncate(&self, n: f64) -> Result<Self> {
        if !(n > 1.0) || n.is_infinite() {
            return Err(Error::InvalidParameter("truncation level must be a finite n > 1"));
        }
        let cap = (n - 1.0) / (n + 1.0);
        let mut mu = self.mu.clone();
        let mut nu = self.nu.clone();
        for (a, b) in mu.values_mut().iter_mut().zip(nu.values_mut().iter_mut()) {
            let s = a.norm() + b.norm();
            if s > cap {
                let t = cap / s;
                *a *= t;
                *b *= t;
            }
        }
        Self::with_margin(mu, nu, self.margin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedVariant {
    /// `f_z̄ = λ·Re f_z`
    Re,
    /// `f_z̄ = λ·Im f_z`
    Im,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCoefficient {
    pub lambda: ComplexField,
    pub variant: ReducedVariant,
}

impl ReducedCoefficient {
    pub fn new(lambda: ComplexField, variant: ReducedVariant) -> Self {
        ReducedCoefficient { lambda, variant }
    }

    /// `K_λ = (1+|λ|)/(1−|λ|)`.
    pub fn dilatation(&self) -> ScalarField {
        ScalarField::from_raw(
            *self.lambda.grid(),
            self.lambda.values().iter().map(|l| dilatation_from_sum(l.norm())).collect(),
        )
    }

    /// Rewrite as a two-characteristic pair: `Re` gives `(λ/2, λ/2)`,
    /// `Im` gives `(λ/(2i), −λ/(2i))`.
    pub fn reduce(&self) -> CoefficientPair {
        let (cm, cn) = match self.variant {
            ReducedVariant::Re => (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)),
            // 1/(2i) = −i/2
            ReducedVariant::Im => (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5)),
        };
        CoefficientPair::new(self.lambda.scale(cm), self.lambda.scale(cn)).expect("same grid")
    }

    /// Pointwise residual `f_z̄ − λ·Re f_z` (or `Im`).
    pub fn residual(&self, fz: &ComplexField, fzb: &ComplexField) -> Result<ComplexField> {
        let part = |w: Complex64| match self.variant {
            ReducedVariant::Re => w.re,
            ReducedVariant::Im => w.im,
        };
        let lf = self.lambda.zip_with(fz, |l, w| l * part(w))?;
        fzb.sub(&lf)
    }
}

/// The phase family `ν = μ·e^{iθ}`. Ellipticity violations land in the mask.
pub fn phase_family(mu: ComplexField, theta: &ScalarField) -> Result<CoefficientPair> {
    mu.same_grid(theta)?;
    let nu = ComplexField::from_raw(
        *mu.grid(),
        mu.values().iter().zip(theta.values()).map(|(&m, &t)| m * Complex64::from_polar(1.0, t)).collect(),
    );
    CoefficientPair::new(mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn g() -> GridSpec {
        GridSpec::centered(1.0, 16).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_pair_has_unit_dilatation() {
        let k = CoefficientPair::zero(g()).dilatation();
        assert!(k.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn dilatation_values() {
        let mu = ComplexField::filled(g(), c(0.3, 0.0));
        let nu = ComplexField::filled(g(), c(0.0, 0.2));
        let k = CoefficientPair::new(mu, nu).unwrap().dilatation();
        assert!(k.values().iter().all(|&v| (v - 3.0).abs() < 1e-14));

        let mu = ComplexField::filled(g(), Complex64::from_polar(1.0 / 3.0, 0.7));
        let k = CoefficientPair::new(mu, ComplexField::zeros(g())).unwrap().dilatation();
        assert!(k.values().iter().all(|&v| (v - 2.0).abs() < 1e-14));
    }

    #[test]
    fn degenerate_cells_are_infinite() {
        let mut mu = ComplexField::filled(g(), c(0.5, 0.0));
        mu[(2, 3)] = c(0.6, 0.0);
        let nu = ComplexField::filled(g(), c(0.4, 0.0));
        let pair = CoefficientPair::new(mu, nu).unwrap();
        assert_eq!(pair.degenerate_mask().count(), 1);
        assert_eq!(pair.dilatation()[(2, 3)], f64::INFINITY);
        assert!((pair.dilatation()[(0, 0)] - 19.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_re_and_im() {
        let lam = ComplexField::filled(g(), c(0.5, 0.0));
        let re = ReducedCoefficient::new(lam.clone(), ReducedVariant::Re).reduce();
        assert_eq!(re.mu()[(0, 0)], c(0.25, 0.0));
        assert_eq!(re.nu()[(0, 0)], c(0.25, 0.0));
        assert!((re.dilatation()[(0, 0)] - 3.0).abs() < 1e-15);

        let im = ReducedCoefficient::new(lam, ReducedVariant::Im).reduce();
        assert_eq!(im.mu()[(0, 0)], c(0.0, -0.25));
        assert_eq!(im.nu()[(0, 0)], c(0.0, 0.25));
        // ν = μ·e^{iπ}
        let rotated = im.mu()[(0, 0)] * Complex64::from_polar(1.0, PI);
        assert!((rotated - im.nu()[(0, 0)]).norm() < 1e-16);

        let zero = ReducedCoefficient::new(ComplexField::zeros(g()), ReducedVariant::Re).reduce();
        assert!(zero.mu().values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn im_reduction_solves_the_im_equation() {
        // f_z̄ = μ f_z + ν conj(f_z) with (λ/2i, −λ/2i) equals λ Im f_z
        let lam = c(0.3, -0.2);
        let w = c(1.7, 0.4);
        let mu = lam * c(0.0, -0.5);
        let nu = lam * c(0.0, 0.5);
        assert!((mu * w + nu * w.conj() - lam * w.im).norm() < 1e-15);
    }

    #[test]
    fn phase_family_shapes() {
        let mu = ComplexField::filled(g(), c(0.2, 0.0));
        let p = phase_family(mu.clone(), &ScalarField::filled(g(), 0.0)).unwrap();
        assert_eq!(p.nu(), p.mu());
        let p = phase_family(mu.clone(), &ScalarField::filled(g(), PI)).unwrap();
        assert!((p.nu()[(1, 1)] + p.mu()[(1, 1)]).norm() < 1e-16);
        let theta = ScalarField::from_fn(g(), |z| 3.0 * z.re + z.im);
        let p = phase_family(mu, &theta).unwrap();
        assert!(p.dilatation().values().iter().all(|&v| (v - 7.0 / 3.0).abs() < 1e-14));
    }

    #[test]
    fn phase_family_records_violations() {
        let mu = ComplexField::filled(g(), c(0.6, 0.0));
        let p = phase_family(mu, &ScalarField::filled(g(), 0.0)).unwrap();
        assert_eq!(p.degenerate_mask().count(), g().len());
    }

    #[test]
    fn truncate_clips_to_cap() {
        let mu = ComplexField::filled(g(), Complex64::from_polar(0.5, 1.0));
        let nu = ComplexField::filled(g(), Complex64::from_polar(0.4, -2.0));
        let pair = CoefficientPair::new(mu, nu).unwrap();
        let t = pair.truncate(9.0).unwrap();
        let s = t.ellipticity();
        assert!(s.values().iter().all(|&v| (v - 0.8).abs() < 1e-15));
        assert!((t.mu()[(0, 0)].arg() - 1.0).abs() < 1e-14);
        assert!((t.nu()[(0, 0)].arg() + 2.0).abs() < 1e-14);
        assert!(t.degenerate_mask().is_empty());
    }

    #[test]
    fn truncate_leaves_bounded_pairs_alone() {
        let mu = ComplexField::filled(g(), c(0.1, 0.1));
        let pair = CoefficientPair::new(mu, ComplexField::zeros(g())).unwrap();
        assert_eq!(pair.truncate(4.0).unwrap(), pair);
        assert!(pair.truncate(1.0).is_err());
    }

    #[test]
    fn truncate_removes_the_mask() {
        let mu = ComplexField::filled(g(), c(1.0, 0.0));
        let pair = CoefficientPair::new(mu, ComplexField::zeros(g())).unwrap();
        assert!(!pair.degenerate_mask().is_empty());
        let t = pair.truncate(256.0).unwrap();
        assert!(t.degenerate_mask().is_empty());
        assert!(t.dilatation().max() <= 256.0 * (1.0 + 1e-12));
    }

    #[test]
    fn sum_dilatation_round_trip() {
        for s in [0.0, 0.1, 0.5, 0.9, 0.999] {
            assert!((sum_from_dilatation(dilatation_from_sum(s)) - s).abs() < 1e-12);
        }
    }
}
