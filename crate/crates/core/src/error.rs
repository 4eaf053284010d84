use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A waveform configuration violates one of its invariants.
    #[error("invalid waveform spec: `{field}` {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An activation pattern is malformed (unsorted, out of range, wrong size).
    #[error("malformed activation pattern: {0}")]
    Pattern(String),

    /// The receiver decided on something the transmitter could never emit.
    #[error("detection error: {0}")]
    Detection(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("frame shape mismatch: {0}")]
    Shape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn spec(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
