use thiserror::Error;

/// Error type shared by every module of the lab.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An enumeration would exceed a configured budget.
    #[error("size limit exceeded: {what} needs {required}, limit is {limit}")]
    SizeLimit {
        what: &'static str,
        required: u128,
        limit: u64,
    },

    #[error("incompatible cyclotomic orders {left} and {right}")]
    CyclotomicOrderMismatch { left: u32, right: u32 },

    /// A verifier was asked to certify a statement whose hypotheses fail.
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
