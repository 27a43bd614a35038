use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("series is identically zero up to order {order}")]
    SingularSeries { order: i64 },

    #[error("coefficient of degree {degree} is not known (series known below order {order})")]
    Truncated { degree: i64, order: i64 },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("sequence index {index} beyond declared length {len}")]
    SequenceTooShort { index: usize, len: usize },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("incomplete spec: {0}")]
    IncompleteSpec(String),

    #[error("invalid process: negative pattern probability {value} for {pattern}")]
    NegativeProbability { pattern: String, value: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid group setup: {0}")]
    Setup(String),

    #[error("enumeration of {required} states exceeds budget {budget}")]
    Budget { required: u128, budget: u128 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("independence of the operands must be asserted by the caller")]
    IndependenceNotAsserted,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
