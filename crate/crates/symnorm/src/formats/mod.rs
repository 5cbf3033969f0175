//! On-disk formats: OBJ meshes, PFM/PGM maps and symmetry plane files.

pub mod obj;
pub mod pnm;
pub mod symfile;
