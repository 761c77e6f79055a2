use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Request beyond what the exact algorithms support (e.g. exhaustive
    /// cut enumeration above 20 vertices).
    #[error("capability error: {0}")]
    Capability(String),

    /// Randomized generation ran out of retries.
    #[error("generation error: {0}")]
    Generation(String),

    /// A schedule step disagrees with the candidate stationary distribution.
    #[error("validation error at step {step}: {reason}")]
    Validation { step: usize, reason: String },

    /// Mixing search hit its horizon cap.
    #[error("mixing not reached by t={best_t}: max l2(pi) distance {max_norm}")]
    Truncated { best_t: usize, max_norm: f64 },

    /// A distribution acquired negative mass beyond rounding dust.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
