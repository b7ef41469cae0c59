use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid resolution is not a power of two ≥ 16, or the geometry is degenerate.
    InvalidGrid(&'static str),
    /// Two fields that must share a grid do not.
    GridMismatch,
    /// A field required to be finite has a NaN or infinite entry.
    NonFinite { index: usize },
    /// Mass of the input outside the central half of the box exceeds the tolerance.
    Padding { outside_fraction: f64 },
    /// `sup(|μ| + |ν|) ≥ 1`, or a degenerate mask is non-empty, in elliptic mode.
    Ellipticity { k: f64 },
    /// The fixed-point iteration did not reach the tolerance; carries the log.
    IterationBudget { log: Vec<(usize, f64)> },
    /// A circle average would sample outside the grid.
    CircleExitsGrid { radius: f64 },
    /// A circle average is not positive.
    NonPositiveAverage { radius: f64 },
    /// A condition probe's lower cutoff violates its side condition.
    CutoffViolation(&'static str),
    /// The tangent-line construction found no touching point within the search bound.
    TangentNotFound { anchor: f64, bound: f64 },
    /// The mapped grid has a non-positively oriented cell inside the audit region.
    NotInjective { cell: (usize, usize) },
    /// A parameter is outside its documented range.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::GridMismatch => f.write_str("fields live on different grids"),
            Error::NonFinite { index } => write!(f, "non-finite value at flat index {index}"),
            Error::Padding { outside_fraction } => write!(
                f,
                "padding contract violated: {outside_fraction:.3e} of the L2 mass lies outside the central half of the box"
            ),
            Error::Ellipticity { k } => {
                write!(f, "not uniformly elliptic: sup(|mu|+|nu|) = {k}")
            }
            Error::IterationBudget { log } => write!(
                f,
                "fixed-point iteration did not converge in {} iterations (last update {:e})",
                log.len(),
                log.last().map_or(f64::NAN, |e| e.1)
            ),
            Error::CircleExitsGrid { radius } => {
                write!(f, "circle of radius {radius} leaves the grid")
            }
            Error::NonPositiveAverage { radius } => {
                write!(f, "non-positive circle average at radius {radius}")
            }
            Error::CutoffViolation(why) => write!(f, "cutoff violates side condition: {why}"),
            Error::TangentNotFound { anchor, bound } => write!(
                f,
                "no tangent point from ({anchor}, 0) found below t = {bound}"
            ),
            Error::NotInjective { cell } => {
                write!(f, "mapped cell ({}, {}) is not positively oriented", cell.0, cell.1)
            }
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
        }
    }
}

impl core::error::Error for Error {}
