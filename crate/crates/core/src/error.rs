use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector operator must have at least one component")]
    EmptyOperator,

    #[error("inadmissible symbol: {0}")]
    Inadmissible(String),

    #[error("grid failure: {0}")]
    Grid(String),

    #[error("duplicate data sites {first} and {second} (separation {separation:e})")]
    DuplicatePoints {
        first: usize,
        second: usize,
        separation: f64,
    },

    #[error("ill-conditioned Gram matrix (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("function does not decay at the grid boundary: boundary/max = {ratio:e}")]
    BoundaryDecay { ratio: f64 },

    #[error("kernel has no spectral density: {0}")]
    NoSpectralDensity(String),

    #[error("quadrature routes disagree: physical {physical:e} vs spectral {spectral:e}")]
    RouteMismatch { physical: f64, spectral: f64 },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
