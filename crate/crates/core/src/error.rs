use alloc::string::String;

/// Errors raised by the geometric and scoring routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A mesh has no vertices or no faces.
    #[error("mesh is empty ({0})")]
    EmptyMesh(&'static str),
    /// A face references a vertex that does not exist.
    #[error("face {face} references vertex {index}, but the mesh has {vertex_count} vertices")]
    FaceIndexOutOfRange {
        /// Face position in the face list.
        face: usize,
        /// Offending vertex index.
        index: usize,
        /// Number of vertices in the mesh.
        vertex_count: usize,
    },
    /// The mesh bounding box has zero extent.
    #[error("mesh bounding box is degenerate")]
    DegenerateBounds,
    /// Every face has zero area.
    #[error("mesh has no samplable area: every face is degenerate")]
    NoSamplableArea,
    /// Not enough distinct points to form a plane hypothesis.
    #[error("insufficient geometry: {0}")]
    InsufficientGeometry(&'static str),
    /// ICP rejected every correspondence.
    #[error("plane refinement diverged: every correspondence was rejected")]
    RefinementDiverged,
    /// ICP kept too few informative correspondences to fit a normal.
    #[error("degenerate correspondences: {0} usable pairs, at least 3 required")]
    DegenerateCorrespondences(usize),
    /// A caller-supplied argument is outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Average precision is undefined without ground truth.
    #[error("average precision is undefined: no ground-truth orientations")]
    UndefinedAp,
    /// No foreground pixels to evaluate.
    #[error("ground-truth normal map has no foreground pixels")]
    NoForeground,
    /// Category tags that are not in the registry.
    #[error("unknown categories: {0}")]
    UnknownCategories(String),
}

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
