//! TOML run configuration. Every command-line flag overrides one key here.

use std::fs;
use std::path::{Path, PathBuf};

use beltrami_core::coefficients::{phase_family, CoefficientPair, ReducedCoefficient, ReducedVariant};
use beltrami_core::grid::{ComplexField, GridSpec, ScalarField, Weight};
use beltrami_core::ladder::LadderParams;
use beltrami_core::radial::{oracle_coefficient, RadialProfile};
use beltrami_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field_io::read_field;
use crate::phi::{PhiSpec, ProfileSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default = "GridConfig::default_half_width")]
    pub half_width: f64,
    #[serde(default = "GridConfig::default_resolution")]
    pub resolution: usize,
}

impl GridConfig {
    fn default_half_width() -> f64 {
        2.0
    }

    fn default_resolution() -> usize {
        256
    }

    pub fn spec(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(Complex64::new(self.center[0], self.center[1]), self.half_width, self.resolution)?)
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { center: [0.0, 0.0], half_width: 2.0, resolution: 256 }
    }
}

/// Where the coefficients come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientSource {
    /// `μ = ν = 0`.
    #[default]
    Zero,
    /// Constant `(μ, ν)` on the disk `|z − c| < radius`, zero outside.
    Disk {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        mu: [f64; 2],
        #[serde(default)]
        nu: [f64; 2],
    },
    /// The reduced coefficient of a radial profile.
    Radial { profile: ProfileSpec },
    /// A sum of `count` Gaussian bumps with seeded random centers in the
    /// central half and random phases, scaled so that `sup|μ| = k`; `ν = 0`.
    Bumps {
        count: usize,
        k: f64,
        #[serde(default = "default_bump_width")]
        width: f64,
    },
    /// A JSON coefficient manifest next to grid-field CSV files.
    Manifest { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn default_bump_width() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// Elliptic when the degenerate mask is empty and `sup(|μ|+|ν|) < 1`.
    #[default]
    Auto,
    Elliptic,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub gap_tol: f64,
    pub caps: Vec<f64>,
    pub mode: SolveMode,
    /// Exponent of the `L^p` norm of `K` in the inequality audit.
    pub audit_p: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            max_iter: 500,
            gap_tol: 1e-3,
            caps: beltrami_core::solver::default_caps(),
            mode: SolveMode::Auto,
            audit_p: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WeightName {
    #[default]
    Unit,
    Spherical,
}

impl WeightName {
    pub fn weight(self) -> Weight {
        match self {
            WeightName::Unit => Weight::Unit,
            WeightName::Spherical => Weight::Spherical,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            WeightName::Unit => "unit",
            WeightName::Spherical => "spherical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmissibilityConfig {
    pub weight: WeightName,
    /// Use the 5×5 interior lattice of centers.
    pub lattice: bool,
    /// Extra centers.
    pub centers: Vec<[f64; 2]>,
    pub k_max: usize,
    pub window: usize,
    pub eps_div: f64,
    pub eps_conv: f64,
    pub q_geo: f64,
}

impl Default for AdmissibilityConfig {
    fn default() -> Self {
        let l = LadderParams::default();
        AdmissibilityConfig {
            weight: WeightName::Unit,
            lattice: true,
            centers: Vec::new(),
            k_max: l.k_max,
            window: l.window,
            eps_div: l.eps_div,
            eps_conv: l.eps_conv,
            q_geo: l.q_geo,
        }
    }
}

impl AdmissibilityConfig {
    pub fn ladder(&self) -> LadderParams {
        LadderParams {
            k_max: self.k_max,
            window: self.window,
            eps_div: self.eps_div,
            eps_conv: self.eps_conv,
            q_geo: self.q_geo,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "OutputConfig::default_dir")]
    pub dir: PathBuf,
}

impl OutputConfig {
    fn default_dir() -> PathBuf {
        PathBuf::from("out")
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: Self::default_dir() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub threads: Option<usize>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub coefficients: CoefficientSource,
    pub phi: Option<PhiSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub admissibility: AdmissibilityConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory relative paths resolve against (the config file's).
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub resolution: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(LabError::io(path))?;
        let mut cfg = Self::parse(&text).map_err(|source| LabError::Toml { path: path.to_path_buf(), source })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        if let Some(n) = o.resolution {
            self.grid.get_or_insert_with(GridConfig::default).resolution = n;
        }
        if let Some(t) = o.tol {
            self.solver.tol = t;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        if !(s.tol > 0.0) || !(s.gap_tol > 0.0) || s.max_iter == 0 {
            return Err(LabError::input("solver tolerances and budget must be positive"));
        }
        if s.caps.is_empty() || s.caps[0] <= 1.0 || s.caps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::input("ladder caps must exceed 1 and increase strictly"));
        }
        if !(s.audit_p >= 1.0) {
            return Err(LabError::input("audit_p must be at least 1"));
        }
        let a = &self.admissibility;
        if !(a.eps_div > 0.0 && a.eps_conv > 0.0 && a.q_geo > 0.0 && a.q_geo < 1.0) || a.window == 0 {
            return Err(LabError::input("ladder thresholds must be positive, q_geo below 1"));
        }
        if self.threads == Some(0) {
            return Err(LabError::input("threads must be at least 1"));
        }
        if let CoefficientSource::Manifest { path } = &self.coefficients {
            let p = self.resolve(path);
            if !p.is_file() {
                return Err(LabError::input(format!("coefficient manifest {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    /// The configured grid, or the default one.
    pub fn grid(&self) -> Result<GridSpec> {
        self.grid.clone().unwrap_or_default().spec()
    }

    /// Build the coefficient pair. Manifest fields carry their own grid; an
    /// explicit `[grid]` section must then agree with it.
    pub fn coefficients(&self) -> Result<CoefficientPair> {
        let pair = match &self.coefficients {
            CoefficientSource::Manifest { path } => {
                let pair = load_manifest(&self.resolve(path))?;
                if let Some(g) = &self.grid {
                    if &g.spec()? != pair.grid() {
                        return Err(beltrami_core::Error::GridMismatch.into());
                    }
                }
                return Ok(pair);
            }
            CoefficientSource::Zero => CoefficientPair::zero(self.grid()?),
            CoefficientSource::Disk { radius, center, mu, nu } => {
                let g = self.grid()?;
                let c = Complex64::new(center[0], center[1]);
                let inside = |z: Complex64, v: [f64; 2]| {
                    if (z - c).norm() < *radius {
                        Complex64::new(v[0], v[1])
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                };
                CoefficientPair::new(
                    ComplexField::from_fn(g, |z| inside(z, *mu)),
                    ComplexField::from_fn(g, |z| inside(z, *nu)),
                )?
            }
            CoefficientSource::Radial { profile } => oracle_coefficient(&profile.build()?, &self.grid()?)?.reduce(),
            CoefficientSource::Bumps { count, k, width } => bumps(self.grid()?, *count, *k, *width, self.seed)?,
        };
        Ok(pair)
    }

    pub fn profile(&self) -> Result<RadialProfile> {
        match &self.coefficients {
            CoefficientSource::Radial { profile } => profile.build(),
            _ => Err(LabError::input("this command needs coefficients.source = \"radial\"")),
        }
    }

    pub fn phi(&self) -> Result<beltrami_core::growth::GrowthFunction> {
        self.phi.as_ref().ok_or_else(|| LabError::input("missing [phi] section"))?.build()
    }
}

fn bumps(g: GridSpec, count: usize, k: f64, width: f64, seed: u64) -> Result<CoefficientPair> {
    if !(0.0..1.0).contains(&k) || !(width > 0.0) || count == 0 {
        return Err(LabError::input("bumps need count ≥ 1, width > 0 and 0 ≤ k < 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = 0.5 * g.half_width() - 3.0 * width;
    if q <= 0.0 {
        return Err(LabError::input("bumps are too wide for the central half of the box"));
    }
    let bumps: Vec<(Complex64, Complex64)> = (0..count)
        .map(|_| {
            let c = g.center() + Complex64::new(rng.random_range(-q..q), rng.random_range(-q..q));
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            (c, Complex64::from_polar(1.0, phase))
        })
        .collect();
    let raw = ComplexField::from_fn(g, |z| {
        bumps.iter().map(|(c, a)| a * (-(z - c).norm_sqr() / (width * width)).exp()).sum()
    });
    let peak = raw.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = if peak > 0.0 { k / peak } else { 0.0 };
    Ok(CoefficientPair::new(raw.scale(Complex64::new(scale, 0.0)), ComplexField::zeros(g))?)
}

#[derive(Debug, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case", deny_unknown_fields)]
enum Manifest {
    General { mu: PathBuf, nu: PathBuf },
    ReducedRe { lambda: PathBuf },
    ReducedIm { lambda: PathBuf },
    SecondType { nu: PathBuf },
    PhaseFamily { mu: PathBuf, theta: PathBuf },
}

/// Read a coefficient manifest; file paths are relative to it.
pub fn load_manifest(path: &Path) -> Result<CoefficientPair> {
    let text = fs::read_to_string(path).map_err(LabError::io(path))?;
    let m: Manifest =
        serde_json::from_str(&text).map_err(|source| LabError::Json { path: path.to_path_buf(), source })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let field = |p: &PathBuf| read_field(&dir.join(p));
    Ok(match m {
        Manifest::General { mu, nu } => CoefficientPair::new(field(&mu)?, field(&nu)?)?,
        Manifest::ReducedRe { lambda } => ReducedCoefficient::new(field(&lambda)?, ReducedVariant::Re).reduce(),
        Manifest::ReducedIm { lambda } => ReducedCoefficient::new(field(&lambda)?, ReducedVariant::Im).reduce(),
        Manifest::SecondType { nu } => CoefficientPair::second_type(field(&nu)?),
        Manifest::PhaseFamily { mu, theta } => {
            let t = field(&theta)?;
            let theta = ScalarField::new(*t.grid(), t.values().iter().map(|v| v.re).collect())?;
            phase_family(field(&mu)?, &theta)?
        }
    })
}
