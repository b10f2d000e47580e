use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid model space: {0}")]
    InvalidSpace(String),

    #[error("point violates the model constraint (residual {residual:e})")]
    InvalidPoint { residual: f64 },

    #[error("points belong to different spaces")]
    SpaceMismatch,

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("geodesic between the points is not unique (distance {distance} vs D_kappa {limit})")]
    NonUniqueGeodesic { distance: f64, limit: f64 },

    #[error("side lengths ({0}, {1}, {2}) violate the triangle inequality")]
    InvalidTriangle(f64, f64, f64),

    #[error("interpolation parameter {0} outside [0, 1]")]
    InvalidParameter(f64),

    #[error("operator domain error: {0}")]
    Domain(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid contraction factor {0}: must lie in [0, 1)")]
    InvalidContraction(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("iteration config: {0}")]
    Config(String),

    #[error("bound is undefined: {0}")]
    UndefinedBound(String),

    #[error("table size {requested} exceeds limit {limit}")]
    SizeLimit { requested: usize, limit: usize },

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },

    #[error("invalid objective: {0}")]
    InvalidObjective(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
