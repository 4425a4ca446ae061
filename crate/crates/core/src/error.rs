use std::path::PathBuf;

/// Errors produced by the multiscale solver and its drivers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("coarse node {index} is not an interior node (interior count {interior})")]
    NotInteriorNode { index: usize, interior: usize },

    #[error("neighborhood {0} has no interior fine nodes")]
    DegenerateNeighborhood(usize),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-positive permeability {value} in fine cell ({ix}, {iy})")]
    NonPositivePermeability { ix: usize, iy: usize, value: f64 },

    #[error("negative weight {value} in fine cell {cell}")]
    NegativeWeight { cell: usize, value: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("spectral mass matrix is singular on neighborhood {0}")]
    SingularSpectralMass(usize),

    #[error("basis rejected: {0}")]
    BasisRejected(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("goal functional is undefined: |g(u)| = {value:e} is below the admissible threshold {threshold:e}")]
    UndefinedGoal { value: f64, threshold: f64 },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("field value {value} at cell ({ix}, {iy}) is not positive ({path}:{line}:{column})")]
    FieldValue {
        path: PathBuf,
        line: usize,
        column: usize,
        ix: usize,
        iy: usize,
        value: f64,
    },

    #[error("feature {index} lies outside the {nx}x{ny} cell grid")]
    FeatureOutOfBounds { index: usize, nx: usize, ny: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
