//! Numerics for the two-characteristic Beltrami equation
//!
//! `f_z̄ = μ(z)·f_z + ν(z)·conj(f_z)`
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It provides:
//!
//! - [`grid`]: square-grid complex/scalar fields, finite-difference Wirtinger
//!   derivatives, Jacobians, norms and midpoint integrals.
//! - [`spectral`]: the Cauchy transform `P` and Beurling transform `S` as
//!   Fourier multipliers on the periodic embedding of the grid.
//! - [`coefficients`]: `(μ, ν)` pairs, dilatations, reductions of the
//!   reduced / Im-type / phase-family equations, and the truncation ladder.
//! - [`growth`]: growth functions `Φ`, their generalized inverse, `H = log Φ`,
//!   the six divergence conditions and an equivalence harness.
//! - [`admissibility`]: circle averages, Lehto-type divergence checks and
//!   `Φ`-area integrals.
//! - [`solver`]: the fixed-point solver, the degenerate ladder driver and
//!   the regularity / inequality audits.
//! - [`ladder`]: the doubling-ladder divergence classifier.
//! - [`radial`]: the closed-form radial solution family used as an oracle.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod admissibility;
pub mod coefficients;
mod error;
mod fft;
pub mod grid;
pub mod growth;
pub mod ladder;
mod quad;
pub mod radial;
mod real;
pub mod solver;
pub mod spectral;
mod sum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use fft::Fft;
pub use quad::adaptive_simpson;
pub use sum::pairwise_sum;
