use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("index ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange { row: usize, col: usize, nrows: usize, ncols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {nrows}x{ncols}")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("matrix is singular: zero pivot at row {row}")]
    Singular { row: usize },

    #[error("only homogeneous Dirichlet data is supported, got value {0}")]
    NonHomogeneousDirichlet(f64),

    #[error("boundary side {0} has no edges in this space")]
    EmptyBoundary(String),

    #[error("ellipticity violated: a0 = {value} at point ({x}, {y})")]
    NotElliptic { value: f64, x: f64, y: f64 },

    #[error("iteration diverged: non-finite value in sample {sample} at iteration {iteration}")]
    Diverged { sample: usize, iteration: usize },

    #[error("zero-magnitude value {0} in grouping (relative metric undefined)")]
    ZeroMagnitude(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv output failed: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
