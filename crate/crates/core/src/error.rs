use thiserror::Error;

use crate::relations::CongruenceViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("symbol `{symbol}` has arity {expected}, applied to {found} argument(s)")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("`{0}` is not an operation symbol and cannot be applied")]
    UnknownOperation(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("no binding for variable `{0}`")]
    UnboundVariable(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("element {element} is outside the carrier 0..{size}")]
    ElementOutOfRange { element: usize, size: usize },

    #[error("size mismatch: expected carrier of size {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("not a congruence: {0}")]
    NotCongruence(CongruenceViolation),

    #[error("carrier size {size} exceeds the enumeration bound {bound}")]
    BoundExceeded { size: usize, bound: usize },

    #[error("the pair does not 3-permute ({0}); no Goursat join formula applies")]
    NotThreePermutable(String),

    #[error("the pair does not 2-permute ({0}); the component formula needs permuting congruences")]
    NotTwoPermutable(String),

    #[error("Goursat hypothesis violated on `{algebra}`: {detail}")]
    GoursatViolation { algebra: String, detail: String },

    #[error("unknown corpus entry `{0}`")]
    UnknownCorpusEntry(String),

    #[error("invalid corpus parameters: {0}")]
    InvalidParameters(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Error {
        match self {
            Error::Parse { .. } => self,
            other => Error::Parse {
                line,
                msg: other.to_string(),
            },
        }
    }
}
