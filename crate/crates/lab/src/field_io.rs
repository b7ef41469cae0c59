//! Grid-field CSV files (`x,y,re,im`, row-major) with a JSON grid sidecar,
//! and the wide solution CSV. Every file is written under a `.partial`
//! name and renamed once complete.

use std::fs;
use std::path::{Path, PathBuf};

use beltrami_core::grid::{ComplexField, GridSpec, ScalarField};
use beltrami_core::solver::Solution;
use beltrami_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::json::float;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub center: [f64; 2],
    pub half_width: f64,
    pub resolution: usize,
}

impl Sidecar {
    pub fn of(grid: &GridSpec) -> Self {
        Sidecar {
            center: [grid.center().re, grid.center().im],
            half_width: grid.half_width(),
            resolution: grid.resolution(),
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(Complex64::new(self.center[0], self.center[1]), self.half_width, self.resolution)?)
    }
}

/// `dir/f.csv` → `dir/f.grid.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("grid.json")
}

fn partial(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// Write to `path.partial`, then rename to `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = partial(path);
    fs::write(&tmp, bytes).map_err(LabError::io(&tmp))?;
    fs::rename(&tmp, path).map_err(LabError::io(path))
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |source| LabError::Csv { path: PathBuf::from("<buffer>"), source };
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(&r).map_err(wrap)?;
    }
    w.into_inner().map_err(|e| LabError::input(e.to_string()))
}

fn write_sidecar(path: &Path, grid: &GridSpec) -> Result<()> {
    let side = serde_json::to_value(Sidecar::of(grid)).expect("plain struct");
    write_atomic(&sidecar_path(path), crate::json::to_string(&side).as_bytes())
}

pub fn write_field(path: &Path, field: &ComplexField) -> Result<()> {
    let g = *field.grid();
    let rows = field.values().iter().enumerate().map(|(k, v)| {
        let z = g.point_at(k);
        vec![float(z.re), float(z.im), float(v.re), float(v.im)]
    });
    write_sidecar(path, &g)?;
    write_atomic(path, &csv_bytes(&["x", "y", "re", "im"], rows)?)
}

/// A real field in the same format, `im = 0`. Infinite entries are
/// written as `inf`.
pub fn write_scalar(path: &Path, field: &ScalarField) -> Result<()> {
    let g = *field.grid();
    let rows = field.values().iter().enumerate().map(|(k, v)| {
        let z = g.point_at(k);
        vec![float(z.re), float(z.im), float(*v), float(0.0)]
    });
    write_sidecar(path, &g)?;
    write_atomic(path, &csv_bytes(&["x", "y", "re", "im"], rows)?)
}

/// `x,y,re_f,im_f,re_fz,im_fz,re_fzb,im_fzb,jacobian`.
pub fn write_solution(path: &Path, s: &Solution) -> Result<()> {
    let g = *s.grid();
    let j = s.jacobian();
    let rows = (0..g.len()).map(|k| {
        let z = g.point_at(k);
        let (f, fz, fzb) = (s.f.values()[k], s.fz.values()[k], s.fzb.values()[k]);
        [z.re, z.im, f.re, f.im, fz.re, fz.im, fzb.re, fzb.im, j.values()[k]].iter().map(|x| float(*x)).collect()
    });
    write_sidecar(path, &g)?;
    let header = ["x", "y", "re_f", "im_f", "re_fz", "im_fz", "re_fzb", "im_fzb", "jacobian"];
    write_atomic(path, &csv_bytes(&header, rows)?)
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let sp = sidecar_path(path);
    let text = fs::read_to_string(&sp).map_err(LabError::io(&sp))?;
    serde_json::from_str(&text).map_err(|source| LabError::Json { path: sp, source })
}

/// Read a field; rejects files whose row count is not `N²` and rows whose
/// coordinates disagree with the sidecar grid.
pub fn read_field(path: &Path) -> Result<ComplexField> {
    let grid = read_sidecar(path)?.grid()?;
    let wrap = |source| LabError::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    let header: Vec<String> = r.headers().map_err(wrap)?.iter().map(|s| s.trim().to_string()).collect();
    if header != ["x", "y", "re", "im"] {
        return Err(LabError::input(format!("{}: expected header x,y,re,im", path.display())));
    }
    let mut values = Vec::with_capacity(grid.len());
    let tol = 1e-9 * grid.spacing();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(wrap)?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| LabError::input(format!("{}: row {} is malformed", path.display(), k + 2)))
        };
        let (x, y) = (num(0)?, num(1)?);
        if k < grid.len() {
            let z = grid.point_at(k);
            if (z.re - x).abs() > tol || (z.im - y).abs() > tol {
                return Err(LabError::input(format!(
                    "{}: row {} lies at ({x}, {y}), not on the sidecar grid",
                    path.display(),
                    k + 2
                )));
            }
        }
        values.push(Complex64::new(num(2)?, num(3)?));
    }
    if values.len() != grid.len() {
        return Err(LabError::input(format!(
            "{}: {} rows for a {}x{} grid",
            path.display(),
            values.len(),
            grid.resolution(),
            grid.resolution()
        )));
    }
    Ok(ComplexField::new(grid, values)?)
}
