use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("state vector must have at least one amplitude")]
    EmptyState,

    #[error("non-finite amplitude at index {index}")]
    NonFinite { index: usize },

    #[error("cannot normalize a zero vector")]
    ZeroNorm,

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("unknown state family `{0}`")]
    UnknownFamily(String),

    #[error("family `{0}` has no closed-form connection")]
    UnsupportedFamily(String),

    #[error("family evaluation failed at {coords:?}: {reason}")]
    Evaluation { coords: Vec<f64>, reason: String },

    #[error("loop is not closed: endpoints differ by {gap:.3e} (tolerance {tolerance:.1e})")]
    OpenLoop { gap: f64, tolerance: f64 },

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("invalid surface patch: {0}")]
    InvalidPatch(String),

    #[error("path too coarse: |overlap| = {magnitude:.3e} between samples {index} and {next}")]
    PathTooCoarse { index: usize, next: usize, magnitude: f64 },

    #[error("too few samples: need at least {min}, got {actual}")]
    TooFewSamples { min: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("norm drift {drift:.3e} in one step exceeds {limit:.1e}; increase the number of steps")]
    StepSize { drift: f64, limit: f64 },

    #[error("adiabaticity lost: |<phi|psi>| = {overlap:.4} is below {threshold}")]
    AdiabaticityLost { overlap: f64, threshold: f64 },

    #[error("loop csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
