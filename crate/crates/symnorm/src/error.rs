use std::path::{Path, PathBuf};

/// Errors raised by file formats, manifests and commands.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Reading or writing a file failed.
    #[error("{}: {source}", path.display())]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying failure.
        #[source]
        source: std::io::Error,
    },
    /// A text input is malformed at a known line.
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        /// File involved, or `-` for in-memory input.
        path: PathBuf,
        /// 1-based line number.
        line: usize,
        /// What went wrong.
        message: String,
    },
    /// A binary or structural format violation.
    #[error("{}: {message}", path.display())]
    Format {
        /// File involved, or `-` for in-memory input.
        path: PathBuf,
        /// What went wrong.
        message: String,
    },
    /// Bad configuration or command-line input.
    #[error("{0}")]
    Input(String),
    /// Geometry or scoring failure from the core library.
    #[error(transparent)]
    Core(#[from] symnorm_core::Error),
    /// One or more images failed evaluation; the rest were scored.
    #[error("{failed} image(s) failed evaluation")]
    PartialFailure {
        /// Number of skipped images.
        failed: usize,
    },
}

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Process exit status for an outcome.
pub const EXIT_OK: i32 = 0;
/// Internal failure.
pub const EXIT_INTERNAL: i32 = 1;
/// Input, parse or configuration failure.
pub const EXIT_INPUT: i32 = 2;
/// Geometric or degenerate-data failure.
pub const EXIT_GEOMETRY: i32 = 3;

impl Error {
    /// Stable process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        use symnorm_core::Error as C;
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Format { .. } | Error::Input(_) => EXIT_INPUT,
            Error::PartialFailure { .. } => EXIT_INPUT,
            Error::Core(c) => match c {
                C::EmptyMesh(_)
                | C::DegenerateBounds
                | C::NoSamplableArea
                | C::InsufficientGeometry(_)
                | C::RefinementDiverged
                | C::DegenerateCorrespondences(_)
                | C::NoForeground
                | C::UndefinedAp => EXIT_GEOMETRY,
                C::FaceIndexOutOfRange { .. } | C::InvalidArgument(_) | C::UnknownCategories(_) => EXIT_INPUT,
            },
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.to_path_buf(), line, message: message.into() }
    }

    pub(crate) fn format(path: &Path, message: impl Into<String>) -> Self {
        Error::Format { path: path.to_path_buf(), message: message.into() }
    }
}
