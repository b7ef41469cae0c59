//! Cauchy transform `P` and Beurling transform `S` as Fourier multipliers on
//! the periodic embedding of the grid.
//!
//! With `ζ = ξ + iη` ranging over the frequency lattice in
//! `[−π/h, π/h)²`, the symbols are
//!
//! | operator | symbol            |
//! |----------|-------------------|
//! | `∂`      | `(i/2)·conj(ζ)`   |
//! | `∂̄`      | `(i/2)·ζ`         |
//! | `P`      | `1/((i/2)·ζ)`     |
//! | `S`      | `conj(ζ)/ζ`       |
//!
//! and every multiplier is zero at `ζ = 0`, so `P` and `S` annihilate the
//! mean. `S` is applied as the `P` multiplier followed by the `∂` multiplier,
//! in that order, so `∂(Pg) = Sg` holds bitwise coefficient by coefficient.
//! The product table is kept for the adjoint and for inspection.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::Fft;
use crate::grid::{ComplexField, GridSpec};
use crate::{Error, Result};

/// Default bound on the fraction of `L²` mass allowed outside the central
/// half of the box.
pub const DEFAULT_PADDING_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectralPlan {
    grid: GridSpec,
    fft: Fft,
    zeta: Vec<Complex64>,
    dz: Vec<Complex64>,
    dzb: Vec<Complex64>,
    cauchy: Vec<Complex64>,
    beurling: Vec<Complex64>,
    padding_tol: f64,
}

impl SpectralPlan {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.resolution();
        let fft = Fft::new(n);
        let base = 2.0 * PI / grid.side();
        let freq = |k: usize| {
            let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
            signed * base
        };
        let half_i = Complex64::new(0.0, 0.5);
        let mut zeta = Vec::with_capacity(n * n);
        let mut dz = Vec::with_capacity(n * n);
        let mut dzb = Vec::with_capacity(n * n);
        let mut cauchy = Vec::with_capacity(n * n);
        let mut beurling = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let z = Complex64::new(freq(i), freq(j));
                let sym_dz = half_i * z.conj();
                let sym_dzb = half_i * z;
                let p = if i == 0 && j == 0 { Complex64::new(0.0, 0.0) } else { Complex64::new(1.0, 0.0) / sym_dzb };
                zeta.push(z);
                dz.push(sym_dz);
                dzb.push(sym_dzb);
                cauchy.push(p);
                beurling.push(sym_dz * p);
            }
        }
        SpectralPlan { grid, fft, zeta, dz, dzb, cauchy, beurling, padding_tol: DEFAULT_PADDING_TOL }
    }

    pub fn with_padding_tol(mut self, tol: f64) -> Self {
        self.padding_tol = tol;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// The frequency lattice, row-major like the fields.
    pub fn frequencies(&self) -> &[Complex64] {
        &self.zeta
    }

    pub fn beurling_multiplier(&self) -> &[Complex64] {
        &self.beurling
    }

    pub fn cauchy_multiplier(&self) -> &[Complex64] {
        &self.cauchy
    }

    pub fn dz_symbol(&self) -> &[Complex64] {
        &self.dz
    }

    pub fn dzb_symbol(&self) -> &[Complex64] {
        &self.dzb
    }

    pub fn forward(&self, f: &ComplexField) -> Vec<Complex64> {
        debug_assert_eq!(f.grid(), &self.grid);
        let mut data = f.values().to_vec();
        self.fft.forward_2d(&mut data);
        data
    }

    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> ComplexField {
        self.fft.inverse_2d(&mut spectrum);
        ComplexField::from_raw(self.grid, spectrum)
    }

    /// Fraction of the `L²` mass of `g` outside the central half of the box.
    pub fn outside_fraction(&self, g: &ComplexField) -> f64 {
        let mut outside = 0.0;
        let mut total = 0.0;
        for (k, v) in g.values().iter().enumerate() {
            let m = v.norm_sqr();
            total += m;
            if !self.grid.in_central_half(self.grid.point_at(k)) {
                outside += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outside / total
        }
    }

    pub fn check_padding(&self, g: &ComplexField) -> Result<()> {
        if g.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let outside_fraction = self.outside_fraction(g);
        if outside_fraction > self.padding_tol {
            return Err(Error::Padding { outside_fraction });
        }
        Ok(())
    }

    /// Multiply a spectrum by the `P` symbol in place.
    pub fn cauchy_spectrum(&self, s: &mut [Complex64]) {
        mul_table(s, &self.cauchy);
    }

    /// Multiply a spectrum by the `∂` symbol in place.
    pub fn dz_spectrum(&self, s: &mut [Complex64]) {
        mul_table(s, &self.dz);
    }

    /// Multiply a spectrum by the `S` symbol in place, as `∂` after `P`.
    pub fn beurling_spectrum(&self, s: &mut [Complex64]) {
        for ((v, p), d) in s.iter_mut().zip(&self.cauchy).zip(&self.dz) {
            *v = d * (p * *v);
        }
    }

    fn apply_beurling(&self, g: &ComplexField) -> ComplexField {
        let mut s = self.forward(g);
        self.beurling_spectrum(&mut s);
        self.inverse(s)
    }

    fn apply(&self, table: &[Complex64], g: &ComplexField) -> ComplexField {
        let mut s = self.forward(g);
        mul_table(&mut s, table);
        self.inverse(s)
    }

    /// `Pg`: spectral coefficients `ĝ/((i/2)ζ)`, zero mean. Enforces the
    /// padding contract.
    pub fn cauchy_transform(&self, g: &ComplexField) -> Result<ComplexField> {
        self.check_padding(g)?;
        Ok(self.apply(&self.cauchy, g))
    }

    /// `Sg`: multiplier `conj(ζ)/ζ`. Enforces the padding contract.
    pub fn beurling_transform(&self, g: &ComplexField) -> Result<ComplexField> {
        self.check_padding(g)?;
        Ok(self.apply_beurling(g))
    }

    /// `Sg` without the padding check (the solver checks its coefficients once).
    pub fn beurling_unchecked(&self, g: &ComplexField) -> ComplexField {
        self.apply_beurling(g)
    }

    pub fn cauchy_unchecked(&self, g: &ComplexField) -> ComplexField {
        self.apply(&self.cauchy, g)
    }

    /// Spectral `∂` of a periodic field.
    pub fn dz(&self, f: &ComplexField) -> ComplexField {
        self.apply(&self.dz, f)
    }

    /// Spectral `∂̄` of a periodic field.
    pub fn dzb(&self, f: &ComplexField) -> ComplexField {
        self.apply(&self.dzb, f)
    }

    /// Adjoint of `S` (multiplier `ζ/conj(ζ)`).
    pub fn beurling_adjoint(&self, g: &ComplexField) -> ComplexField {
        let table: Vec<Complex64> = self.beurling.iter().map(|m| m.conj()).collect();
        self.apply(&table, g)
    }
}

fn mul_table(s: &mut [Complex64], table: &[Complex64]) {
    for (v, m) in s.iter_mut().zip(table) {
        *v *= m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{l2_norm, wirtinger_fd, Region};
    use crate::real;

    fn bump(grid: GridSpec) -> ComplexField {
        ComplexField::from_fn(grid, |z| {
            let w = z - Complex64::new(0.1, -0.2);
            Complex64::new(1.0, 0.5) * real::exp(-w.norm_sqr() / 0.08) + z * real::exp(-z.norm_sqr() / 0.05)
        })
    }

    #[test]
    fn multipliers_are_unimodular_with_zero_mean_mode() {
        let plan = SpectralPlan::new(GridSpec::centered(2.0, 32).unwrap());
        assert_eq!(plan.beurling_multiplier()[0], Complex64::new(0.0, 0.0));
        assert_eq!(plan.cauchy_multiplier()[0], Complex64::new(0.0, 0.0));
        for m in &plan.beurling_multiplier()[1..] {
            assert!((m.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = GridSpec::centered(2.0, 32).unwrap();
        let plan = SpectralPlan::new(g);
        let p = plan.cauchy_transform(&ComplexField::zeros(g)).unwrap();
        assert!(p.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn constant_is_annihilated_by_s() {
        let g = GridSpec::centered(2.0, 32).unwrap();
        let plan = SpectralPlan::new(g);
        let s = plan.beurling_unchecked(&ComplexField::filled(g, Complex64::new(2.0, -1.0)));
        assert!(s.values().iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn padding_violation_is_reported() {
        let g = GridSpec::centered(2.0, 32).unwrap();
        let plan = SpectralPlan::new(g);
        let f = ComplexField::filled(g, Complex64::new(1.0, 0.0));
        assert!(matches!(plan.cauchy_transform(&f), Err(Error::Padding { .. })));
    }

    #[test]
    fn dzb_of_cauchy_is_mean_free_input() {
        let g = GridSpec::centered(2.0, 256).unwrap();
        let plan = SpectralPlan::new(g);
        let b = bump(g);
        let p = plan.cauchy_transform(&b).unwrap();
        let back = plan.dzb(&p);
        let m = b.mean();
        let target = b.map(|v| v - m);
        let err = l2_norm(&back.sub(&target).unwrap(), None) / l2_norm(&target, None);
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn spectral_dz_agrees_with_finite_differences() {
        // fixes the conj(ζ) convention of the ∂ symbol
        let g = GridSpec::centered(2.0, 256).unwrap();
        let plan = SpectralPlan::new(g);
        let f = ComplexField::from_fn(g, |z| z * z * real::exp(-z.norm_sqr() / 0.1));
        let spec = plan.dz(&f);
        let (fd, _) = wirtinger_fd(&f);
        let r = Region::central(&g, 0.5).unwrap();
        let err = l2_norm(&spec.sub(&fd).unwrap(), Some(r)) / l2_norm(&fd, Some(r));
        assert!(err < 1e-2, "{err}");
        // the conjugate convention would give the ∂̄ symbol instead
        let wrong = plan.dzb(&f);
        let err = l2_norm(&wrong.sub(&fd).unwrap(), Some(r)) / l2_norm(&fd, Some(r));
        assert!(err > 0.5, "{err}");
    }

    #[test]
    fn adjoint_inverts_s_on_mean_free_part() {
        let g = GridSpec::centered(2.0, 64).unwrap();
        let plan = SpectralPlan::new(g);
        let b = bump(g);
        let back = plan.beurling_adjoint(&plan.beurling_unchecked(&b));
        let m = b.mean();
        for (x, y) in back.values().iter().zip(b.values()) {
            assert!((x - (y - m)).norm() < 1e-12);
        }
    }
}
