//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed container or stream data.
    #[error("parse error: {0}")]
    Parse(String),

    /// Recognized container but an unsupported variant (colorspace, bit depth, ...).
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// Operands with incompatible or out-of-contract dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A temporal operation was asked of a clip with too few frames.
    #[error("insufficient frames: {0}")]
    InsufficientFrames(String),

    /// Input data outside the operation's domain (zero variance, one-sided, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A (subject, session) rating group that cannot be standardized.
    #[error("degenerate session: subject {subject}, session {session}: {reason}")]
    DegenerateSession {
        subject: String,
        session: u8,
        reason: String,
    },

    /// Videos left with no retained ratings after subject rejection.
    #[error("videos with no retained ratings: {}", ids.join(", "))]
    EmptyVideo { ids: Vec<String> },

    /// All values equal where a spread is required (e.g. rescaling).
    #[error("degenerate range: {0}")]
    DegenerateRange(String),

    /// Non-finite or otherwise invalid numeric input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A record or vector does not match the declared schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Model file cannot be decoded (truncation, version, schema).
    #[error("model format error: {0}")]
    ModelFormat(String),

    /// Ids present in one table but missing from another.
    #[error("id mismatch across inputs: {}", ids.join(", "))]
    Join { ids: Vec<String> },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by invalid user-supplied data (CLI exit code 1),
    /// false for runtime failures (exit code 2).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
