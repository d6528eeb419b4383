use thiserror::Error;

use crate::partition::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet sizes differ: {0} vs {1}")]
    AlphabetMismatch(u32, u32),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("map is not a homeomorphism")]
    NotHomeomorphism,
    #[error("map is not an orientation-preserving homeomorphism")]
    NotOrientationPreserving,
    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceExhausted { what: &'static str, needed: usize, cap: usize },
    #[error("conditioning set has zero measure")]
    EmptyConditioning,
    #[error("point {point} is not periodic with minimal period {period}")]
    NotPeriodic { point: String, period: usize },
    #[error("family depth {depth} is below the required {required}")]
    InsufficientDepth { depth: usize, required: usize },
    #[error("inconsistent family: {0}")]
    InconsistentFamily(Violation),
    #[error("target is not E-invariant: marginals differ at word {word}")]
    NonInvariantTarget { word: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no periodic orbit up to period {0}; rotation number not detected as rational")]
    RotationNotDetected(usize),
    #[error("{0}")]
    Refused(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Exit code class used by the CLI and the C ABI: 2 invalid input, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceExhausted { .. } => 3,
            _ => 2,
        }
    }
}
