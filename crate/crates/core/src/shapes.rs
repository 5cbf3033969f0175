//! Procedural meshes: boxes, regular prisms and icospheres.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Result;
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;

/// Axis-aligned box centered at the origin with outward winding.
pub fn cuboid(size_x: f64, size_y: f64, size_z: f64) -> Result<TriangleMesh> {
    let (hx, hy, hz) = (0.5 * size_x, 0.5 * size_y, 0.5 * size_z);
    let vertices = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { -hx } else { hx },
                if i & 2 == 0 { -hy } else { hy },
                if i & 4 == 0 { -hz } else { hz },
            )
        })
        .collect();
    let quads = [
        [0, 4, 6, 2], // -x
        [1, 3, 7, 5], // +x
        [0, 1, 5, 4], // -y
        [2, 6, 7, 3], // +y
        [0, 2, 3, 1], // -z
        [4, 5, 7, 6], // +z
    ];
    let faces = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
    TriangleMesh::new(vertices, faces)
}

/// Right prism over a regular polygon with `sides` corners on a circle of
/// `radius` in the xy-plane, extruded along z over `[-height/2, height/2]`.
/// The first corner lies on +x. Caps are fanned from their centers.
pub fn regular_prism(sides: usize, radius: f64, height: f64) -> Result<TriangleMesh> {
    let h = 0.5 * height;
    let mut vertices = Vec::with_capacity(2 * sides + 2);
    for z in [-h, h] {
        for i in 0..sides {
            let a = 2.0 * core::f64::consts::PI * i as f64 / sides as f64;
            vertices.push(Vec3::new(radius * libm::cos(a), radius * libm::sin(a), z));
        }
    }
    let bottom_center = vertices.len();
    vertices.push(Vec3::new(0.0, 0.0, -h));
    let top_center = vertices.len();
    vertices.push(Vec3::new(0.0, 0.0, h));
    let mut faces = Vec::with_capacity(4 * sides);
    for i in 0..sides {
        let j = (i + 1) % sides;
        let (b0, b1, t0, t1) = (i, j, sides + i, sides + j);
        faces.push([b0, b1, t1]);
        faces.push([b0, t1, t0]);
        faces.push([bottom_center, b1, b0]);
        faces.push([top_center, t0, t1]);
    }
    TriangleMesh::new(vertices, faces)
}

/// Unit icosphere: an icosahedron with `subdivisions` rounds of midpoint
/// subdivision, every vertex projected onto the unit sphere.
pub fn icosphere(subdivisions: usize) -> Result<TriangleMesh> {
    let t = (1.0 + libm::sqrt(5.0)) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).try_normalize().expect("nonzero"))
    .collect();
    let mut faces: Vec<[usize; 3]> = alloc::vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).try_normalize().expect("nonzero"));
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriangleMesh::new(vertices, faces)
}

/// Tetrahedron over four corner points.
pub fn tetrahedron(corners: [Vec3; 4]) -> Result<TriangleMesh> {
    TriangleMesh::new(corners.to_vec(), alloc::vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])
}
