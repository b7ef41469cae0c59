//! IO, run configuration and command drivers around `beltrami-core`.
//!
//! - [`field_io`]: grid-field CSV files with JSON grid sidecars.
//! - [`json`]: deterministic JSON output.
//! - [`phi`]: growth-function and radial-profile descriptors.
//! - [`config`]: the TOML run configuration.
//! - [`commands`]: `check-phi`, `check-field`, `solve`, `oracle`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
mod error;
pub mod field_io;
pub mod json;
pub mod phi;

pub use error::{LabError, Result};
