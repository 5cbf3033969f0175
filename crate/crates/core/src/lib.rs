//! Reflection-symmetry extraction and geometric ground truth for 3D shapes.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`mesh`]: triangle meshes and area-weighted surface sampling
//! - [`symmetry`]: point-pair voting, reflective ICP refinement, scoring and
//!   duplicate suppression of symmetry planes
//! - [`orientation`]: Fibonacci orientation codebooks, binning, Euler poses and
//!   view distributions
//! - [`render`]: a software rasterizer for camera-frame normal maps and their
//!   discretized label maps
//! - [`eval`]: symmetry average precision and surface-normal metrics
//!
//! File formats, manifests and the command line live in the `symnorm` crate.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

mod error;
pub mod eval;
pub mod geom;
pub mod mesh;
pub mod nn;
pub mod orientation;
pub mod render;
pub mod shapes;
pub mod symmetry;

pub use error::{Error, Result};
pub use geom::{Mat3, Vec3};
pub use mesh::{sample_surface, SurfaceSamples, TriangleMesh};
pub use orientation::{
    bin_orientation, euler_to_rotation, fibonacci_codebook, make_symmetry_label,
    rotate_orientations, sample_view, CodebookSupport, OrientationCodebook, ViewDistribution,
    ViewPose, ViewSetting,
};
pub use render::{
    discretize_normal_map, labels_to_normals, rasterize, CameraIntrinsics, LabelMap, NormalMap,
};
pub use symmetry::{
    dedupe_planes, detect_symmetries, generate_hypotheses, reflect_point, refine_plane_icp,
    score_plane, DetectorConfig, SymmetryPlane,
};
