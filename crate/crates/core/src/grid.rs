//! Square-grid geometry, complex and scalar fields, discrete Wirtinger
//! derivatives, norms and integrals.
//!
//! The grid is cell-centered: node `(i, j)` sits at
//! `center + (−w + (i + ½)·h) + i·(−w + (j + ½)·h)` where `w` is the half
//! width and `h = 2w/N`. With an even resolution no node coincides with the
//! center, so fields singular at the center can be sampled directly.

use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::real;
use crate::sum::{pairwise_sum, pairwise_sum_by};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    center: Complex64,
    half_width: f64,
    resolution: usize,
}

impl GridSpec {
    pub fn new(center: Complex64, half_width: f64, resolution: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid("half width must be positive and finite"));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidGrid("center must be finite"));
        }
        if resolution < 16 || !resolution.is_power_of_two() {
            return Err(Error::InvalidGrid("resolution must be a power of two >= 16"));
        }
        Ok(GridSpec { center, half_width, resolution })
    }

    /// Grid centered at the origin.
    pub fn centered(half_width: f64, resolution: usize) -> Result<Self> {
        Self::new(Complex64::new(0.0, 0.0), half_width, resolution)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Side length of the (periodic) box.
    pub fn side(&self) -> f64 {
        2.0 * self.half_width
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.center.re - self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.center.im - self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.y(j))
    }

    /// Node at a flat row-major index.
    #[inline]
    pub fn point_at(&self, index: usize) -> Complex64 {
        self.point(index % self.resolution, index / self.resolution)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.resolution + i
    }

    /// Distance from `z` to the boundary of the box (negative outside).
    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        let dx = self.half_width - (z.re - self.center.re).abs();
        let dy = self.half_width - (z.im - self.center.im).abs();
        dx.min(dy)
    }

    /// Whether `z` lies in the central half `center ± half_width/2`.
    pub fn in_central_half(&self, z: Complex64) -> bool {
        let q = 0.5 * self.half_width;
        (z.re - self.center.re).abs() <= q && (z.im - self.center.im).abs() <= q
    }

    /// The same box at a different resolution.
    pub fn with_resolution(&self, resolution: usize) -> Result<Self> {
        Self::new(self.center, self.half_width, resolution)
    }
}

/// Half-open rectangle of node indices `[i0, i1) × [j0, j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl Region {
    pub fn full(grid: &GridSpec) -> Self {
        let n = grid.resolution();
        Region { i0: 0, i1: n, j0: 0, j1: n }
    }

    /// Nodes whose coordinates fall inside the closed box `[lo, hi]`.
    pub fn from_box(grid: &GridSpec, lo: Complex64, hi: Complex64) -> Result<Self> {
        let n = grid.resolution();
        let h = grid.spacing();
        let first = |v: f64, origin: f64| {
            let t = real::ceil((v - origin) / h - 0.5).max(0.0);
            (t as usize).min(n)
        };
        let last = |v: f64, origin: f64| {
            let t = real::floor((v - origin) / h - 0.5) + 1.0;
            if t < 0.0 {
                0
            } else {
                (t as usize).min(n)
            }
        };
        let ox = grid.center().re - grid.half_width();
        let oy = grid.center().im - grid.half_width();
        let r = Region { i0: first(lo.re, ox), i1: last(hi.re, ox), j0: first(lo.im, oy), j1: last(hi.im, oy) };
        if r.i1 <= r.i0 + 1 || r.j1 <= r.j0 + 1 {
            return Err(Error::InvalidParameter("region contains fewer than 2x2 nodes"));
        }
        Ok(r)
    }

    /// The central `fraction` of the box (0.5 gives the central quarter by area).
    pub fn central(grid: &GridSpec, fraction: f64) -> Result<Self> {
        let q = 0.5 * fraction * grid.side();
        let c = grid.center();
        Self::from_box(grid, c - Complex64::new(q, q), c + Complex64::new(q, q))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.i0..self.i1).contains(&i) && (self.j0..self.j1).contains(&j)
    }

    pub fn width(&self) -> usize {
        self.i1 - self.i0
    }

    pub fn height(&self) -> usize {
        self.j1 - self.j0
    }
}

/// Integration weight for [`area_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Unit,
    /// `1/(1+|z|²)²`, the spherical area element.
    Spherical,
}

impl Weight {
    #[inline]
    pub fn at(self, z: Complex64) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::Spherical => {
                let d = 1.0 + z.norm_sqr();
                1.0 / (d * d)
            }
        }
    }
}

macro_rules! field_common {
    ($name:ident, $elem:ty) => {
        impl $name {
            pub fn grid(&self) -> &GridSpec {
                &self.grid
            }

            pub fn values(&self) -> &[$elem] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [$elem] {
                &mut self.values
            }

            pub fn into_values(self) -> Vec<$elem> {
                self.values
            }

            pub fn from_fn(grid: GridSpec, f: impl Fn(Complex64) -> $elem) -> Self {
                let values = (0..grid.len()).map(|k| f(grid.point_at(k))).collect();
                $name { grid, values }
            }

            pub fn filled(grid: GridSpec, value: $elem) -> Self {
                $name { grid, values: alloc::vec![value; grid.len()] }
            }

            /// Pointwise map keeping the grid.
            pub fn map(&self, f: impl Fn($elem) -> $elem) -> Self {
                $name { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
            }

            pub fn same_grid<T: HasGrid>(&self, other: &T) -> Result<()> {
                if self.grid == *other.grid_ref() {
                    Ok(())
                } else {
                    Err(Error::GridMismatch)
                }
            }
        }

        impl HasGrid for $name {
            fn grid_ref(&self) -> &GridSpec {
                &self.grid
            }
        }

        impl Index<(usize, usize)> for $name {
            type Output = $elem;
            fn index(&self, (i, j): (usize, usize)) -> &$elem {
                &self.values[self.grid.index(i, j)]
            }
        }

        impl IndexMut<(usize, usize)> for $name {
            fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut $elem {
                let k = self.grid.index(i, j);
                &mut self.values[k]
            }
        }
    };
}

pub trait HasGrid {
    fn grid_ref(&self) -> &GridSpec;
}

/// Complex values sampled on a grid, row-major (`values[j·N + i]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

field_common!(ComplexField, Complex64);

impl ComplexField {
    /// Validated constructor: length must be `N²` and every entry finite.
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid("value count does not match resolution"));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(ComplexField { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ComplexField { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::filled(grid, Complex64::new(0.0, 0.0))
    }

    /// The coordinate function `z`.
    pub fn identity(grid: GridSpec) -> Self {
        Self::from_fn(grid, |z| z)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn norm(&self) -> ScalarField {
        ScalarField { grid: self.grid, values: self.values.iter().map(|v| v.norm()).collect() }
    }

    /// Mean over all nodes.
    pub fn mean(&self) -> Complex64 {
        let n = self.values.len();
        let re = pairwise_sum_by(n, &|k| self.values[k].re);
        let im = pairwise_sum_by(n, &|k| self.values[k].im);
        Complex64::new(re, im) / n as f64
    }

    pub fn zip_with(&self, other: &ComplexField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.same_grid(other)?;
        Ok(ComplexField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    /// Real parts as a scalar field (may be negative).
    pub fn re(&self) -> ScalarField {
        ScalarField { grid: self.grid, values: self.values.iter().map(|v| v.re).collect() }
    }

    /// Shift by whole lattice steps with periodic wrap-around.
    pub fn roll(&self, di: isize, dj: isize) -> Self {
        let n = self.grid.resolution() as isize;
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); self.values.len()];
        for j in 0..n {
            for i in 0..n {
                let ti = (i + di).rem_euclid(n) as usize;
                let tj = (j + dj).rem_euclid(n) as usize;
                out[self.grid.index(ti, tj)] = self.values[self.grid.index(i as usize, j as usize)];
            }
        }
        ComplexField { grid: self.grid, values: out }
    }
}

/// Real values on a grid. Entries may be `+∞` for extended-valued fields
/// such as dilatations on a degenerate mask; signed fields such as
/// Jacobians use the same container.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

field_common!(ScalarField, f64);

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid("value count does not match resolution"));
        }
        if let Some(index) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::NonFinite { index });
        }
        Ok(ScalarField { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn is_extended(&self) -> bool {
        self.values.iter().any(|v| v.is_infinite())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Bilinear interpolation at an arbitrary point; `None` outside the
    /// convex hull of the nodes.
    pub fn bilinear(&self, z: Complex64) -> Option<f64> {
        let g = &self.grid;
        let h = g.spacing();
        let n = g.resolution();
        let u = (z.re - g.center().re + g.half_width()) / h - 0.5;
        let v = (z.im - g.center().im + g.half_width()) / h - 0.5;
        if !(u >= 0.0 && v >= 0.0 && u <= (n - 1) as f64 && v <= (n - 1) as f64) {
            return None;
        }
        let i = (real::floor(u) as usize).min(n - 2);
        let j = (real::floor(v) as usize).min(n - 2);
        let fu = u - i as f64;
        let fv = v - j as f64;
        let a = self[(i, j)];
        let b = self[(i + 1, j)];
        let c = self[(i, j + 1)];
        let d = self[(i + 1, j + 1)];
        // skip zero-weight corners so an infinite neighbour does not poison the result
        let mut acc = 0.0;
        for (w, val) in [((1.0 - fu) * (1.0 - fv), a), (fu * (1.0 - fv), b), ((1.0 - fu) * fv, c), (fu * fv, d)] {
            if w != 0.0 {
                acc += w * val;
            }
        }
        Some(acc)
    }
}

/// Boolean cell mask on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    grid: GridSpec,
    values: Vec<bool>,
}

impl Mask {
    pub fn from_fn(grid: GridSpec, f: impl Fn(Complex64) -> bool) -> Self {
        Mask { grid, values: (0..grid.len()).map(|k| f(grid.point_at(k))).collect() }
    }

    pub fn empty(grid: GridSpec) -> Self {
        Mask { grid, values: alloc::vec![false; grid.len()] }
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<bool>) -> Self {
        Mask { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, k: usize) -> bool {
        self.values[k]
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn and(&self, other: &Mask) -> Mask {
        Mask { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| *a && *b).collect() }
    }

    pub fn not(&self) -> Mask {
        Mask { grid: self.grid, values: self.values.iter().map(|b| !b).collect() }
    }
}

/// Discrete Wirtinger derivatives `(∂f, ∂̄f)` by centered differences, with
/// one-sided second-order stencils on the boundary ring.
pub fn wirtinger_fd(f: &ComplexField) -> (ComplexField, ComplexField) {
    let g = *f.grid();
    let n = g.resolution();
    let inv2h = 1.0 / (2.0 * g.spacing());
    let v = f.values();
    let d = |at: &dyn Fn(usize) -> Complex64, k: usize| -> Complex64 {
        if k == 0 {
            (at(0) * -3.0 + at(1) * 4.0 - at(2)) * inv2h
        } else if k == n - 1 {
            (at(n - 1) * 3.0 - at(n - 2) * 4.0 + at(n - 3)) * inv2h
        } else {
            (at(k + 1) - at(k - 1)) * inv2h
        }
    };
    let mut fz = Vec::with_capacity(g.len());
    let mut fzb = Vec::with_capacity(g.len());
    let half = Complex64::new(0.5, 0.0);
    let iu = Complex64::new(0.0, 1.0);
    for j in 0..n {
        for i in 0..n {
            let fx = d(&|ii| v[g.index(ii, j)], i);
            let fy = d(&|jj| v[g.index(i, jj)], j);
            fz.push((fx - iu * fy) * half);
            fzb.push((fx + iu * fy) * half);
        }
    }
    (ComplexField::from_raw(g, fz), ComplexField::from_raw(g, fzb))
}

/// Pointwise `|f_z|² − |f_z̄|²`. The result is signed.
pub fn jacobian(fz: &ComplexField, fzb: &ComplexField) -> Result<ScalarField> {
    fz.same_grid(fzb)?;
    Ok(ScalarField::from_raw(
        *fz.grid(),
        fz.values().iter().zip(fzb.values()).map(|(a, b)| a.norm_sqr() - b.norm_sqr()).collect(),
    ))
}

/// Discrete `L²` norm `(Σ|f|²·h²)^{1/2}`, optionally restricted to a region.
pub fn l2_norm(f: &ComplexField, region: Option<Region>) -> f64 {
    let g = f.grid();
    let r = region.unwrap_or_else(|| Region::full(g));
    let w = r.width();
    let s = pairwise_sum_by(w * r.height(), &|k| {
        let i = r.i0 + k % w;
        let j = r.j0 + k / w;
        f[(i, j)].norm_sqr()
    });
    real::sqrt(s * g.cell_area())
}

/// Discrete `L²` norm over the nodes selected by a mask.
pub fn l2_norm_masked(f: &ComplexField, mask: &Mask) -> f64 {
    let s = pairwise_sum_by(f.values().len(), &|k| {
        if mask.get(k) {
            f.values()[k].norm_sqr()
        } else {
            0.0
        }
    });
    real::sqrt(s * f.grid().cell_area())
}

/// Midpoint-rule integral `Σ g·w·h²`. Infinite samples propagate to `+∞`.
pub fn area_integral(g: &ScalarField, weight: Weight, mask: Option<&Mask>) -> f64 {
    let grid = g.grid();
    let terms: Vec<f64> = g
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| if mask.is_some_and(|m| !m.get(k)) { 0.0 } else { v * weight.at(grid.point_at(k)) })
        .collect();
    pairwise_sum(&terms) * grid.cell_area()
}
