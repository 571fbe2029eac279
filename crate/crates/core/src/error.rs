use std::fmt;
use std::path::PathBuf;

/// Location inside a PLY file where a parse problem was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyPosition {
    /// 1-based line number (header and ASCII bodies).
    Line(usize),
    /// 0-based byte offset into the file (binary bodies).
    Byte(u64),
}

impl fmt::Display for PlyPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlyPosition::Line(l) => write!(f, "line {l}"),
            PlyPosition::Byte(b) => write!(f, "byte {b}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed PLY at {position}: {message}")]
    PlyMalformed {
        position: PlyPosition,
        message: String,
    },

    #[error("unsupported PLY at {position}: {message}")]
    PlyUnsupported {
        position: PlyPosition,
        message: String,
    },

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate sampling: every point coincides with its nearest neighbour")]
    DegenerateSampling,

    #[error("point {index}: only {found} neighbours within radius, need at least {required}")]
    InsufficientNeighbors {
        index: usize,
        found: usize,
        required: usize,
    },

    #[error("point {index}: neighbourhood is collinear, tangent plane undefined")]
    DegenerateNeighborhood { index: usize },

    #[error("point {index} duplicates point {duplicate_of}")]
    DuplicatePoint { index: usize, duplicate_of: usize },

    #[error("point {index}: Voronoi cell degenerate after perturbation")]
    DegenerateCell { index: usize },

    #[error("mass entry {index} is not positive and finite")]
    NonPositiveMass { index: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("{n} points exceed the dense eigensolve limit of {limit}; downsample first")]
    TooLarge { n: usize, limit: usize },

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error(
        "operator is not negative semidefinite: generalized eigenvalue {value:e} exceeds tolerance"
    )]
    NotSemidefinite { value: f64 },

    #[error(
        "Fourier matrix is defective or nearly so (eigenvector condition {cond:e} > {threshold:e}); \
         perturb the cloud or reduce the point count"
    )]
    IllConditioned { cond: f64, threshold: f64 },

    #[error("eigendecomposition reconstruction error {error:e} exceeds {limit:e}")]
    ReconstructionFailure { error: f64, limit: f64 },

    #[error("signal belongs to a different basis or operator")]
    BasisMismatch,

    #[error("signal order {found} does not match required order {expected}")]
    OrderMismatch { expected: f64, found: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the failure stems from numerics (as opposed to bad input or configuration).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSampling
                | Error::InsufficientNeighbors { .. }
                | Error::DegenerateNeighborhood { .. }
                | Error::DuplicatePoint { .. }
                | Error::DegenerateCell { .. }
                | Error::NonPositiveMass { .. }
                | Error::NonConvergence(_)
                | Error::NotSemidefinite { .. }
                | Error::IllConditioned { .. }
                | Error::ReconstructionFailure { .. }
        )
    }

    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::PlyMalformed { .. }
                | Error::PlyUnsupported { .. }
                | Error::InvalidCloud(_)
        )
    }
}
