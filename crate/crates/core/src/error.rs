use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("degenerate soliton parameters: {0}")]
    DegenerateSoliton(String),

    #[error("box too small: {0}")]
    BoxTooSmall(String),

    #[error("field provides x-derivatives up to order {available}, order {requested} requested")]
    Capability { requested: usize, available: usize },

    #[error("step size: {0}")]
    StepSize(String),

    #[error("trajectory diverged: {0}")]
    Divergence(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
