//! Wavefront OBJ subset: `v` and `f` records only.

use std::fmt::Write as _;
use std::path::Path;

use symnorm_core::{TriangleMesh, Vec3};

use crate::error::{Error, Result};

/// Parses OBJ text. `path` only labels error messages.
///
/// Faces may use `i`, `i/j`, `i//k` or `i/j/k` references, negative indices
/// count back from the latest vertex, and polygons are fanned from their
/// first corner. Other record types are ignored.
pub fn parse_obj(bytes: &[u8], path: &Path) -> Result<TriangleMesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut face_lines: Vec<usize> = Vec::new();
    for (k, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = k + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = std::str::from_utf8(raw).map_err(|_| Error::parse(path, line_no, "invalid UTF-8"))?;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut xyz = [0.0; 3];
                for c in &mut xyz {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| Error::parse(path, line_no, "vertex needs three coordinates"))?;
                    *c = parse_coord(tok).ok_or_else(|| Error::parse(path, line_no, format!("bad number `{tok}`")))?;
                }
                vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let corners = tokens
                    .map(|tok| resolve_index(tok, vertices.len()).map_err(|m| Error::parse(path, line_no, m)))
                    .collect::<Result<Vec<usize>>>()?;
                if corners.len() < 3 {
                    return Err(Error::parse(path, line_no, "face needs at least three vertices"));
                }
                for w in 1..corners.len() - 1 {
                    faces.push([corners[0], corners[w], corners[w + 1]]);
                    face_lines.push(line_no);
                }
            }
            _ => {}
        }
    }
    for (face, line) in faces.iter().zip(&face_lines) {
        if let Some(&i) = face.iter().find(|&&i| i >= vertices.len()) {
            return Err(Error::parse(
                path,
                *line,
                format!("vertex index {} out of range ({} vertices)", i + 1, vertices.len()),
            ));
        }
    }
    Ok(TriangleMesh::new(vertices, faces)?)
}

fn parse_coord(tok: &str) -> Option<f64> {
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

// 1-based or negative OBJ reference to a 0-based index. Texture and normal
// references are validated as integers and dropped.
fn resolve_index(tok: &str, count: usize) -> std::result::Result<usize, String> {
    let mut parts = tok.split('/');
    let head = parts.next().unwrap_or_default();
    for extra in parts {
        if !extra.is_empty() && extra.parse::<i64>().is_err() {
            return Err(format!("bad face reference `{tok}`"));
        }
    }
    let i: i64 = head.parse().map_err(|_| format!("bad face reference `{tok}`"))?;
    match i {
        0 => Err("face index 0 is invalid (OBJ indices start at 1)".into()),
        i if i > 0 => Ok((i - 1) as usize),
        i => {
            let back = i.unsigned_abs() as usize;
            if back > count {
                Err(format!("relative index {i} reaches before the first vertex"))
            } else {
                Ok(count - back)
            }
        }
    }
}

/// Writes `v`/`f` records that [`parse_obj`] reads back bit for bit.
pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        // shortest round-trip formatting
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}
