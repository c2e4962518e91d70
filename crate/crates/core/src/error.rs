use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input failed a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two inputs that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// KL divergence is undefined: q has zero mass where p does not.
    #[error("KL divergence undefined: q[{index}] = 0 but p[{index}] > 0")]
    DivergenceUndefined { index: usize },

    /// A distribution carries no mass on the violating states, so it cannot
    /// be restricted to them. Smoothing the counts first avoids this.
    #[error("no probability mass on error states")]
    NoErrorMass,

    /// A configuration field is missing, ill-typed, or violates a constraint.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// An operation was invoked before the protocol reached the required state.
    #[error("protocol state: {0}")]
    ProtocolState(String),

    /// An artifact file or payload does not match its documented format.
    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
