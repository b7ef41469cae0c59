#![allow(dead_code)]

//! Periodic-lattice correction for the disk indicator on a square box of side
//! `L`. The spectral `P` and `S` act on the periodic embedding, so they see
//! every translate of the disk plus a neutralizing background. With `ζ` and
//! `℘` the Weierstrass functions of the lattice `L·Z[i]`,
//!
//! `P_per χ = P χ + (ζ(z) − 1/z) − (a/L²)·z̄`,
//! `S_per χ = S χ − (℘(z) − 1/z²)`,
//!
//! where `a` is the disk area. The mean value property over the disk turns
//! the lattice sum into a point evaluation at `z`. The Laurent tails use
//! `℘(u) − 1/u² = Σ c_k u^{2k}`, `c_1 = g₂/20`, `c_2 = 0` on the square
//! lattice and the standard recurrence beyond.

use beltrami_core::Complex64;

/// Lemniscate constant.
const LEMNISCATE: f64 = 2.622_057_554_292_119_8;

pub struct SquareLattice {
    side: f64,
    /// `c_k` for `k = 1..`.
    coeffs: Vec<f64>,
}

impl SquareLattice {
    pub fn new(side: f64, terms: usize) -> Self {
        let g4 = LEMNISCATE.powi(4) / 15.0;
        let g2 = 60.0 * g4;
        let mut c = vec![0.0; terms + 1];
        c[1] = g2 / 20.0;
        for k in 3..=terms {
            let s: f64 = (1..=k - 2).map(|m| c[m] * c[k - 1 - m]).sum();
            c[k] = 3.0 * s / ((2 * k + 3) as f64 * (k - 2) as f64);
        }
        let coeffs = (1..=terms).map(|k| c[k] / side.powi(2 * k as i32 + 2)).collect();
        SquareLattice { side, coeffs }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// `ζ(z) − 1/z = −Σ c_k z^{2k+1}/(2k+1)`.
    pub fn zeta_tail(&self, z: Complex64) -> Complex64 {
        let z2 = z * z;
        let mut p = z * z2;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i + 1;
            acc -= p * (c / (2 * k + 1) as f64);
            p *= z2;
        }
        acc
    }

    /// `℘(z) − 1/z² = Σ c_k z^{2k}`.
    pub fn wp_tail(&self, z: Complex64) -> Complex64 {
        let z2 = z * z;
        let mut p = z2;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            acc += p * *c;
            p *= z2;
        }
        acc
    }

    /// Periodic minus free-space `P` of the indicator of a centred disk with
    /// area `area`.
    pub fn cauchy_correction(&self, z: Complex64, area: f64) -> Complex64 {
        self.zeta_tail(z) - z.conj() * (area / (self.side * self.side))
    }

    /// Periodic minus free-space `S` of the same indicator.
    pub fn beurling_correction(&self, z: Complex64) -> Complex64 {
        -self.wp_tail(z)
    }
}

/// Free-space `(1/π) Σ h² g(w)/(z − w)` by direct summation over the nodes,
/// the singular self term dropped (its principal value over a square cell
/// is zero).
pub fn direct_cauchy(points: &[Complex64], values: &[f64], h: f64, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, g) in points.iter().zip(values) {
        if *g != 0.0 && (z - w).norm() > 1e-12 {
            acc += *g / (z - w);
        }
    }
    acc * (h * h / std::f64::consts::PI)
}
