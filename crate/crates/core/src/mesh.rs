//! Indexed triangle meshes and uniform surface sampling.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{Mat3, Vec3};

/// An indexed triangle soup with a cached bounding-box diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    bbox_min: Vec3,
    bbox_max: Vec3,
    bbox_diagonal: f64,
}

impl TriangleMesh {
    /// Validates and builds a mesh. Faces are 0-based vertex index triples.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyMesh("no vertices"));
        }
        if faces.is_empty() {
            return Err(Error::EmptyMesh("no faces"));
        }
        if let Some(v) = vertices.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!("non-finite vertex {v:?}")));
        }
        let vertex_count = vertices.len();
        for (face, tri) in faces.iter().enumerate() {
            if let Some(&index) = tri.iter().find(|&&i| i >= vertex_count) {
                return Err(Error::FaceIndexOutOfRange { face, index, vertex_count });
            }
        }
        let (bbox_min, bbox_max) = bounds(&vertices);
        let bbox_diagonal = (bbox_max - bbox_min).norm();
        if !(bbox_diagonal > 0.0) {
            return Err(Error::DegenerateBounds);
        }
        Ok(TriangleMesh { vertices, faces, bbox_min, bbox_max, bbox_diagonal })
    }

    /// Vertex positions.
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    /// Face vertex-index triples.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Length of the axis-aligned bounding-box diagonal.
    pub fn bbox_diagonal(&self) -> f64 {
        self.bbox_diagonal
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bbox(&self) -> (Vec3, Vec3) {
        (self.bbox_min, self.bbox_max)
    }

    /// Center of the axis-aligned bounding box.
    pub fn bbox_center(&self) -> Vec3 {
        (self.bbox_min + self.bbox_max) * 0.5
    }

    /// Corner positions of face `f`.
    pub fn triangle(&self, f: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unnormalized face normal `(b - a) × (c - a)` (length is twice the area).
    pub fn face_cross(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.triangle(f);
        (b - a).cross(c - a)
    }

    /// Area of face `f`.
    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_cross(f).norm()
    }

    /// Unit face normal oriented by vertex winding, `None` for degenerate faces.
    pub fn face_normal(&self, f: usize) -> Option<Vec3> {
        self.face_cross(f).try_normalize()
    }

    /// Total surface area.
    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Applies `map` to every vertex and rebuilds the cached bounds.
    pub fn map_vertices(&self, map: impl Fn(Vec3) -> Vec3) -> Result<TriangleMesh> {
        TriangleMesh::new(self.vertices.iter().map(|&v| map(v)).collect(), self.faces.clone())
    }

    /// The mesh rotated by `r` about the origin.
    pub fn rotated(&self, r: &Mat3) -> Result<TriangleMesh> {
        self.map_vertices(|v| *r * v)
    }

    /// The mesh uniformly scaled by `s` about the origin.
    pub fn scaled(&self, s: f64) -> Result<TriangleMesh> {
        self.map_vertices(|v| v * s)
    }
}

fn bounds(points: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = points[0];
    let mut hi = points[0];
    for &p in &points[1..] {
        lo = lo.min(p);
        hi = hi.max(p);
    }
    (lo, hi)
}

/// Points drawn uniformly over a mesh surface, with their face normals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SurfaceSamples {
    /// Sample positions.
    pub points: Vec<Vec3>,
    /// Unit face normal of the face each sample lies on.
    pub normals: Vec<Vec3>,
    /// Index of the face each sample was drawn from.
    pub source_face: Vec<usize>,
    /// Seed the samples were drawn with.
    pub seed: u64,
}

impl SurfaceSamples {
    /// Wraps a bare point cloud (normals zero, faces unknown) so that the
    /// symmetry routines can run on synthetic data.
    pub fn from_points(points: Vec<Vec3>) -> Self {
        let n = points.len();
        SurfaceSamples {
            points,
            normals: alloc::vec![Vec3::ZERO; n],
            source_face: alloc::vec![usize::MAX; n],
            seed: 0,
        }
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when there are no samples.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Diagonal of the axis-aligned bounding box of the sample points
    /// (zero for an empty or single-point cloud).
    pub fn bbox_diagonal(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let (lo, hi) = bounds(&self.points);
        (hi - lo).norm()
    }
}

/// Draws `count` points uniformly over the mesh surface.
///
/// Faces are chosen with probability proportional to area and barycentric
/// coordinates are folded into the triangle. Zero-area faces never receive
/// samples. The result depends only on `(mesh, count, seed)`.
pub fn sample_surface(mesh: &TriangleMesh, count: usize, seed: u64) -> Result<SurfaceSamples> {
    let mut cdf = Vec::with_capacity(mesh.faces().len());
    let mut normals = Vec::with_capacity(mesh.faces().len());
    let mut total = 0.0;
    for f in 0..mesh.faces().len() {
        let cross = mesh.face_cross(f);
        let area = 0.5 * cross.norm();
        let normal = if area > 0.0 { cross.try_normalize() } else { None };
        if normal.is_some() {
            total += area;
        }
        cdf.push(total);
        normals.push(normal);
    }
    if !(total > 0.0) {
        return Err(Error::NoSamplableArea);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SurfaceSamples {
        points: Vec::with_capacity(count),
        normals: Vec::with_capacity(count),
        source_face: Vec::with_capacity(count),
        seed,
    };
    for _ in 0..count {
        let target = rng.random::<f64>() * total;
        // first face whose cumulative area exceeds the target; zero-area faces
        // never satisfy the strict inequality because they repeat the previous
        // cumulative value
        let mut f = cdf.partition_point(|&c| c <= target);
        if f >= cdf.len() {
            // target rounded up to the total
            f = normals.iter().rposition(Option::is_some).expect("total area is positive");
        }
        let mut u = rng.random::<f64>();
        let mut v = rng.random::<f64>();
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        let [a, b, c] = mesh.triangle(f);
        out.points.push(a + (b - a) * u + (c - a) * v);
        out.normals.push(normals[f].expect("sampled faces have area"));
        out.source_face.push(f);
    }
    Ok(out)
}
