use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("graph has no vertices")]
    Empty,

    #[error("invalid edge ({i}, {j}): {msg}")]
    InvalidEdge { i: usize, j: usize, msg: String },

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph needs at least two vertices, got {0}")]
    TooSmall(usize),

    #[error("coarsening stalled at level {level} with {n} vertices")]
    Stalled { level: usize, n: usize },

    #[error("start vector is numerically parallel to the constant vector")]
    ParallelToOnes,

    #[error("zero vector")]
    ZeroVector,

    #[error("non-finite value encountered during {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric: entry ({i}, {j}) differs from its transpose")]
    Asymmetric { i: usize, j: usize },

    #[error("matrix of size {n} exceeds the dense limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid Laplacian: {0}")]
    InvalidLaplacian(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("grid sizes do not nest: {0}")]
    InvalidNesting(String),
}
