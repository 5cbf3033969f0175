//! Symmetry plane text files: one `nx ny nz b residual` line per plane.

use std::fmt::Write as _;
use std::path::Path;

use symnorm_core::{SymmetryPlane, Vec3};

use crate::error::{Error, Result};

/// Renders planes with 12 significant digits, preceded by `comments` as
/// `#` lines.
pub fn write_planes(planes: &[SymmetryPlane], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for p in planes {
        let _ = writeln!(
            out,
            "{:.11e} {:.11e} {:.11e} {:.11e} {:.11e}",
            p.normal.x, p.normal.y, p.normal.z, p.offset, p.residual
        );
    }
    out
}

/// Parses a plane file; blank and `#` lines are skipped. Normals are
/// normalized and sign-canonicalized.
pub fn read_planes(text: &str, path: &Path) -> Result<Vec<SymmetryPlane>> {
    let mut planes = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::parse(path, k + 1, "expected five decimal numbers"))?;
        let [nx, ny, nz, b, residual] = values[..] else {
            return Err(Error::parse(path, k + 1, format!("expected 5 fields, found {}", values.len())));
        };
        if residual < 0.0 {
            return Err(Error::parse(path, k + 1, "negative residual"));
        }
        let plane = SymmetryPlane::new(Vec3::new(nx, ny, nz), b).map_err(|e| Error::parse(path, k + 1, e.to_string()))?;
        planes.push(plane.with_residual(residual));
    }
    Ok(planes)
}
