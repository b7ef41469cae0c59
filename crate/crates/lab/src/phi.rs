//! Serializable descriptors for growth functions and radial profiles.

use beltrami_core::growth::{Family, GrowthFunction, Interp};
use beltrami_core::radial::RadialProfile;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;
use crate::json::num;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiSpec {
    Power {
        p: f64,
    },
    Exponential {
        alpha: f64,
    },
    ExpPower {
        alpha: f64,
        beta: f64,
    },
    TLogT,
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
    /// Levels may be the string `"inf"` in JSON; TOML has `inf` natively.
    Step {
        jumps: Vec<[StepLevel; 2]>,
    },
    Staircase {
        alpha: f64,
        ratio: f64,
    },
    Tabulated {
        samples: Vec<[f64; 2]>,
        #[serde(default)]
        log_linear: bool,
    },
    /// Replace the base below its tangent point through `(anchor, 0)`.
    Convexified {
        base: Box<PhiSpec>,
        anchor: f64,
    },
}

/// A float that also accepts `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepLevel {
    Num(f64),
    Text(String),
}

impl StepLevel {
    fn value(&self) -> Result<f64> {
        match self {
            StepLevel::Num(x) => Ok(*x),
            StepLevel::Text(s) if s == "inf" => Ok(f64::INFINITY),
            StepLevel::Text(s) => Err(crate::error::LabError::input(format!("bad number {s:?}"))),
        }
    }
}

fn pairs(v: &[[f64; 2]]) -> Vec<(f64, f64)> {
    v.iter().map(|p| (p[0], p[1])).collect()
}

impl PhiSpec {
    pub fn build(&self) -> Result<GrowthFunction> {
        Ok(match self {
            PhiSpec::Power { p } => GrowthFunction::power(*p)?,
            PhiSpec::Exponential { alpha } => GrowthFunction::exponential(*alpha)?,
            PhiSpec::ExpPower { alpha, beta } => GrowthFunction::exp_power(*alpha, *beta)?,
            PhiSpec::TLogT => GrowthFunction::t_log_t(),
            PhiSpec::PiecewiseLinear { knots } => GrowthFunction::piecewise_linear(pairs(knots))?,
            PhiSpec::Step { jumps } => {
                let j = jumps.iter().map(|[t, v]| Ok((t.value()?, v.value()?))).collect::<Result<Vec<_>>>()?;
                GrowthFunction::step(j)?
            }
            PhiSpec::Staircase { alpha, ratio } => GrowthFunction::staircase(*alpha, *ratio)?,
            PhiSpec::Tabulated { samples, log_linear } => {
                let interp = if *log_linear { Interp::LogLinear } else { Interp::Linear };
                GrowthFunction::tabulated(pairs(samples), interp)?
            }
            PhiSpec::Convexified { base, anchor } => beltrami_core::growth::convexify_tail(&base.build()?, *anchor)?,
        })
    }
}

fn knots(v: &[(f64, f64)]) -> Value {
    crate::json::pairs(v)
}

/// `{"family", "params", "t0", "blow_up_T"}`.
pub fn describe(phi: &GrowthFunction) -> Value {
    let params = match phi.family() {
        Family::Power { p } => json!({ "p": num(*p) }),
        Family::Exponential { alpha } => json!({ "alpha": num(*alpha) }),
        Family::ExpPower { alpha, beta } => json!({ "alpha": num(*alpha), "beta": num(*beta) }),
        Family::TLogT => json!({}),
        Family::PiecewiseLinear { knots: k } => json!({ "knots": knots(k) }),
        Family::Step { jumps } => json!({ "jumps": knots(jumps) }),
        Family::Staircase { alpha, ratio } => json!({ "alpha": num(*alpha), "ratio": num(*ratio) }),
        Family::Tabulated { samples, interp } => {
            json!({ "samples": knots(samples), "log_linear": *interp == Interp::LogLinear })
        }
        Family::Convexified { base, anchor, touch, slope } => json!({
            "base": describe(base),
            "anchor": num(*anchor),
            "touch": num(*touch),
            "slope": num(*slope),
        }),
    };
    json!({
        "family": phi.family_name(),
        "params": params,
        "t0": num(phi.t0()),
        "blow_up_T": num(phi.blow_up_t()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant { k: f64 },
    LogE,
    Power { scale: f64, exponent: f64 },
    Tabulated { samples: Vec<[f64; 2]> },
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        Ok(match self {
            ProfileSpec::Constant { k } => RadialProfile::constant(*k)?,
            ProfileSpec::LogE => RadialProfile::LogE,
            ProfileSpec::Power { scale, exponent } => RadialProfile::power(*scale, *exponent)?,
            ProfileSpec::Tabulated { samples } => RadialProfile::tabulated(pairs(samples))?,
        })
    }
}

pub fn describe_profile(p: &RadialProfile) -> Value {
    let params = match p {
        RadialProfile::Constant(k) => json!({ "k": num(*k) }),
        RadialProfile::LogE => json!({}),
        RadialProfile::Power { scale, exponent } => json!({ "scale": num(*scale), "exponent": num(*exponent) }),
        RadialProfile::Tabulated(s) => json!({ "samples": knots(s) }),
    };
    json!({ "family": p.name(), "params": params })
}
