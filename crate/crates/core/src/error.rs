use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("dispersion matrix {index} violates the power constraint: trace(AᴴA) = {trace}, expected {expected}")]
    PowerConstraint { index: usize, trace: f64, expected: f64 },

    #[error("duplicate dispersion matrices at indices {first} and {second}")]
    DuplicateMatrix { first: usize, second: usize },

    #[error("product map is not injective: codewords {first} and {second} coincide")]
    DuplicateCodeword { first: usize, second: usize },

    #[error("rank-deficient training: {0}")]
    RankDeficient(String),

    #[error("singular matrix")]
    Singular,

    #[error("need at least 2 codewords, found {0}")]
    TooFewCodewords(usize),

    #[error("empty codebook")]
    EmptyCodebook,

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error{}: field `{field}`: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        field: String,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn dims(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            found: found.into(),
        }
    }
}
