//! Perspective z-buffer rasterization of camera-frame surface normals.
//!
//! The camera looks at the bounding-box center of the mesh from the +z side of
//! the rotated frame, at a distance that fits the bounding sphere into the
//! field of view with a margin. Pixel `(i, j)` has its center at
//! `(i + 0.5, j + 0.5)` with row 0 at the top. Coverage follows the top-left
//! fill rule, so a pixel center on an edge shared by two triangles is filled
//! exactly once.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geom::{to_radians, Vec3};
use crate::mesh::TriangleMesh;
use crate::orientation::{bin_unchecked, CodebookSupport, OrientationCodebook, ViewPose};

/// Image size and lens of the virtual camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    /// Image width in pixels.
    pub width: usize,
    /// Image height in pixels.
    pub height: usize,
    /// Vertical field of view, degrees.
    pub fov_y_deg: f64,
    /// Bounding-sphere framing margin, at least 1.
    pub auto_frame_margin: f64,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        CameraIntrinsics { width: 224, height: 224, fov_y_deg: 30.0, auto_frame_margin: 1.1 }
    }
}

impl CameraIntrinsics {
    /// Camera with the default lens and framing.
    pub fn with_size(width: usize, height: usize) -> Self {
        CameraIntrinsics { width, height, ..Default::default() }
    }

    /// Checks size, field of view and margin.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(invalid("image width and height must be at least 1"));
        }
        if !(self.fov_y_deg > 0.0 && self.fov_y_deg < 180.0) {
            return Err(invalid(alloc::format!("fov_y_deg must be in (0, 180), got {}", self.fov_y_deg)));
        }
        if !(self.auto_frame_margin >= 1.0 && self.auto_frame_margin.is_finite()) {
            return Err(invalid("auto_frame_margin must be at least 1"));
        }
        Ok(())
    }

    /// Focal length in pixels.
    pub fn focal_px(&self) -> f64 {
        0.5 * self.height as f64 / libm::tan(0.5 * to_radians(self.fov_y_deg))
    }

    /// Camera-frame direction of the ray through the center of pixel `(i, j)`.
    pub fn pixel_ray(&self, i: usize, j: usize) -> Vec3 {
        let f = self.focal_px();
        Vec3::new(
            (i as f64 + 0.5 - 0.5 * self.width as f64) / f,
            -(j as f64 + 0.5 - 0.5 * self.height as f64) / f,
            -1.0,
        )
    }
}

/// Per-pixel camera-frame unit normals with a foreground mask and depth.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMap {
    width: usize,
    height: usize,
    normals: Vec<Vec3>,
    mask: Vec<bool>,
    depth: Vec<f64>,
}

/// Depth value of background pixels.
pub const BACKGROUND_DEPTH: f64 = f64::INFINITY;

impl NormalMap {
    /// An all-background map.
    pub fn background(width: usize, height: usize) -> Self {
        let n = width * height;
        NormalMap {
            width,
            height,
            normals: vec![Vec3::ZERO; n],
            mask: vec![false; n],
            depth: vec![BACKGROUND_DEPTH; n],
        }
    }

    /// Builds a map from row-major normals. Zero vectors are background;
    /// other vectors are normalized. Missing depth means unknown (sentinel).
    pub fn from_normals(width: usize, height: usize, normals: Vec<Vec3>, depth: Option<Vec<f64>>) -> Result<Self> {
        let n = width * height;
        if normals.len() != n {
            return Err(invalid(alloc::format!("expected {n} normals, got {}", normals.len())));
        }
        let mut depth = depth.unwrap_or_else(|| vec![BACKGROUND_DEPTH; n]);
        if depth.len() != n {
            return Err(invalid(alloc::format!("expected {n} depth values, got {}", depth.len())));
        }
        let mut mask = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for (i, v) in normals.into_iter().enumerate() {
            if v == Vec3::ZERO {
                out.push(Vec3::ZERO);
                depth[i] = BACKGROUND_DEPTH;
            } else {
                let u = v
                    .try_normalize()
                    .ok_or_else(|| invalid(alloc::format!("pixel {i} has a non-finite normal")))?;
                out.push(u);
                mask[i] = true;
            }
        }
        Ok(NormalMap { width, height, normals: out, mask, depth })
    }

    /// Width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Height in pixels.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major normals (zero on background).
    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    /// Row-major foreground mask.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Row-major view depth (`-z` in camera frame), infinite on background.
    pub fn depth(&self) -> &[f64] {
        &self.depth
    }

    /// Normal at column `i`, row `j`, if foreground.
    pub fn normal_at(&self, i: usize, j: usize) -> Option<Vec3> {
        let k = j * self.width + i;
        self.mask[k].then_some(self.normals[k])
    }

    /// Number of foreground pixels.
    pub fn foreground_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Per-pixel orientation bins; `k` marks background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    k: u16,
    labels: Vec<u16>,
}

impl LabelMap {
    /// Builds a label map; every label must be at most `k` (the background
    /// value).
    pub fn new(width: usize, height: usize, k: usize, labels: Vec<u16>) -> Result<Self> {
        let k = u16::try_from(k).map_err(|_| invalid("label maps support at most 65535 bins"))?;
        if labels.len() != width * height {
            return Err(invalid(alloc::format!("expected {} labels, got {}", width * height, labels.len())));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > k) {
            return Err(invalid(alloc::format!("label {bad} exceeds background value {k}")));
        }
        Ok(LabelMap { width, height, k, labels })
    }

    /// Width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Height in pixels.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of bins; also the background label.
    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// Background label value.
    pub fn background_label(&self) -> u16 {
        self.k
    }

    /// Row-major labels.
    pub fn labels(&self) -> &[u16] {
        &self.labels
    }
}

/// A rasterized normal map plus the winning face of every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendering {
    /// Camera-frame normals, mask and depth.
    pub map: NormalMap,
    /// Face drawn at each pixel, `None` on background.
    pub face_ids: Vec<Option<usize>>,
}

/// Where the camera sits relative to the mesh for a pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Framing {
    /// World-space point mapped to the camera axis.
    pub center: Vec3,
    /// Bounding-sphere radius about `center`.
    pub radius: f64,
    /// Distance from the camera to `center`.
    pub distance: f64,
}

impl Framing {
    /// Camera-frame position of a world point.
    pub fn to_camera(&self, pose: &ViewPose, p: Vec3) -> Vec3 {
        *pose.rotation() * (p - self.center) - Vec3::new(0.0, 0.0, self.distance)
    }
}

/// Auto-framing for a mesh: bounding sphere about the bbox center fitted into
/// the narrower of the vertical and horizontal fields of view.
pub fn frame_mesh(mesh: &TriangleMesh, cam: &CameraIntrinsics) -> Result<Framing> {
    cam.validate()?;
    let center = mesh.bbox_center();
    let radius = mesh.vertices().iter().map(|v| v.distance(center)).fold(0.0, f64::max);
    if !(radius > 0.0) {
        return Err(invalid("mesh bounding sphere has zero radius"));
    }
    let half_y = 0.5 * to_radians(cam.fov_y_deg);
    let half_x = libm::atan(libm::tan(half_y) * cam.width as f64 / cam.height as f64);
    let half = half_y.min(half_x);
    let distance = cam.auto_frame_margin * radius / libm::sin(half);
    Ok(Framing { center, radius, distance })
}

// Edge function: twice the signed area of (a, b, p) in y-down screen space.
fn edge(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

// With positive triangle area the interior lies where every edge function is
// positive; an edge is top or left when the interior is below or right of it.
fn is_top_left(a: (f64, f64), b: (f64, f64)) -> bool {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    (dy == 0.0 && dx > 0.0) || dy < 0.0
}

fn covers(w: f64, top_left: bool) -> bool {
    w > 0.0 || (w == 0.0 && top_left)
}

/// Renders the camera-frame normal map of `mesh` seen under `pose`.
pub fn rasterize(mesh: &TriangleMesh, pose: &ViewPose, cam: &CameraIntrinsics) -> Result<NormalMap> {
    Ok(rasterize_faces(mesh, pose, cam)?.map)
}

/// Like [`rasterize`] but also reports the face drawn at each pixel.
pub fn rasterize_faces(mesh: &TriangleMesh, pose: &ViewPose, cam: &CameraIntrinsics) -> Result<Rendering> {
    if mesh.faces().is_empty() {
        return Err(Error::EmptyMesh("no faces"));
    }
    let framing = frame_mesh(mesh, cam)?;
    let (w, h) = (cam.width, cam.height);
    let f = cam.focal_px();
    let (cx, cy) = (0.5 * w as f64, 0.5 * h as f64);

    let cam_pts: Vec<Vec3> = mesh.vertices().iter().map(|&v| framing.to_camera(pose, v)).collect();
    let screen: Vec<(f64, f64)> = cam_pts
        .iter()
        .map(|p| {
            let inv = 1.0 / -p.z;
            (cx + f * p.x * inv, cy - f * p.y * inv)
        })
        .collect();

    let mut map = NormalMap::background(w, h);
    let mut face_ids = vec![None; w * h];
    for (fi, tri) in mesh.faces().iter().enumerate() {
        let Some(world_n) = mesh.face_normal(fi) else { continue };
        let mut n = *pose.rotation() * world_n;
        if n.z < 0.0 || (n.z == 0.0 && n.dot(cam_pts[tri[0]]) > 0.0) {
            n = -n;
        }
        let mut idx = *tri;
        let mut area = edge(screen[idx[0]], screen[idx[1]], screen[idx[2]]);
        if area == 0.0 || !area.is_finite() {
            continue;
        }
        if area < 0.0 {
            idx.swap(1, 2);
            area = -area;
        }
        let [s0, s1, s2] = [screen[idx[0]], screen[idx[1]], screen[idx[2]]];
        let inv_depth = [1.0 / -cam_pts[idx[0]].z, 1.0 / -cam_pts[idx[1]].z, 1.0 / -cam_pts[idx[2]].z];
        let tl = [is_top_left(s1, s2), is_top_left(s2, s0), is_top_left(s0, s1)];

        let min_x = s0.0.min(s1.0).min(s2.0);
        let max_x = s0.0.max(s1.0).max(s2.0);
        let min_y = s0.1.min(s1.1).min(s2.1);
        let max_y = s0.1.max(s1.1).max(s2.1);
        let Some((i0, i1)) = pixel_span(min_x, max_x, w) else { continue };
        let Some((j0, j1)) = pixel_span(min_y, max_y, h) else { continue };
        for j in j0..=j1 {
            let py = j as f64 + 0.5;
            for i in i0..=i1 {
                let p = (i as f64 + 0.5, py);
                let w0 = edge(s1, s2, p);
                let w1 = edge(s2, s0, p);
                let w2 = edge(s0, s1, p);
                if !(covers(w0, tl[0]) && covers(w1, tl[1]) && covers(w2, tl[2])) {
                    continue;
                }
                let inv = (w0 * inv_depth[0] + w1 * inv_depth[1] + w2 * inv_depth[2]) / area;
                let depth = 1.0 / inv;
                let k = j * w + i;
                if depth < map.depth[k] {
                    map.depth[k] = depth;
                    map.normals[k] = n;
                    map.mask[k] = true;
                    face_ids[k] = Some(fi);
                }
            }
        }
    }
    Ok(Rendering { map, face_ids })
}

// Pixel indices whose centers can fall in [lo, hi], clamped to the image.
fn pixel_span(lo: f64, hi: f64, n: usize) -> Option<(usize, usize)> {
    let first = libm::ceil(lo - 0.5).max(0.0);
    let last = libm::floor(hi - 0.5).min(n as f64 - 1.0);
    (first <= last).then(|| (first as usize, last as usize))
}

/// Bins every foreground normal against a hemisphere codebook
/// (signed, nearest direction); background pixels get label `K`.
pub fn discretize_normal_map(nm: &NormalMap, codebook: &OrientationCodebook) -> Result<LabelMap> {
    if codebook.support() != CodebookSupport::Hemisphere {
        return Err(invalid("normal maps are discretized with a hemisphere codebook"));
    }
    let k = codebook.k();
    if k > u16::MAX as usize {
        return Err(invalid("label maps support at most 65535 bins"));
    }
    let labels = nm
        .normals
        .iter()
        .zip(&nm.mask)
        .map(|(&n, &m)| if m { bin_unchecked(codebook, n, false) as u16 } else { k as u16 })
        .collect();
    LabelMap::new(nm.width, nm.height, k, labels)
}

/// Replaces every foreground label with its codebook direction.
/// Depth is unknown and set to the background sentinel.
pub fn labels_to_normals(lm: &LabelMap, codebook: &OrientationCodebook) -> Result<NormalMap> {
    if codebook.k() != lm.k() {
        return Err(invalid(alloc::format!(
            "label map has {} bins but the codebook has {}",
            lm.k(),
            codebook.k()
        )));
    }
    let mut map = NormalMap::background(lm.width, lm.height);
    for (idx, &l) in lm.labels.iter().enumerate() {
        if l == lm.k {
            continue;
        }
        let d = codebook
            .direction(l as usize)
            .ok_or_else(|| invalid(alloc::format!("label {l} out of range")))?;
        map.normals[idx] = d;
        map.mask[idx] = true;
    }
    Ok(map)
}
