use thiserror::Error;

/// Errors produced by measure construction, spectral estimation and the
/// verification harnesses.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("density vanishes on an interior region ({0}); the Poincaré constant is infinite")]
    DisconnectedSupport(String),

    #[error("eigensolver failed to converge: {0}")]
    EigenSolve(String),

    #[error("grid would exceed the memory guard ({nodes} nodes > {guard})")]
    GridTooLarge { nodes: usize, guard: usize },

    #[error("convolution clipped {clipped:.3e} of negative mass (limit {limit:.1e})")]
    ConvolutionNoise { clipped: f64, limit: f64 },

    #[error("P charges a cell with zero product weight (P is not absolutely continuous w.r.t. Q)")]
    SupportViolation,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("subset family leaves index {index} uncovered (t = 0); the bound is vacuous")]
    UncoveredIndex { index: usize },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_parameter(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
