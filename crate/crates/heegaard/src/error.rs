use num_bigint::BigUint;
use thiserror::Error;

/// Every fallible operation in the crate returns this error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid genus {0}: expected a positive integer")]
    InvalidGenus(i64),

    #[error("letter {0} is outside the edge alphabet")]
    Alphabet(i64),

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("not a normal curve: {0}")]
    NotNormal(String),

    #[error("component {0} is not cyclically reduced; normalize it first")]
    NormalizationRequired(usize),

    #[error("wrong encoding: {0}")]
    Encoding(String),

    #[error("conflicting substitution rules for letter {0}")]
    RuleConsistency(i64),

    #[error("offset {offset} out of range for a word of length {length}")]
    OffsetOutOfRange { offset: BigUint, length: BigUint },

    #[error("size guard exceeded: needs {length} but the cap is {guard}")]
    SizeGuard { length: BigUint, guard: u64 },

    #[error("word parse error: {0}")]
    ParseWord(String),

    #[error("genus mismatch: word has genus {word}, surface has genus {surface}")]
    GenusMismatch { word: u32, surface: u32 },

    #[error("move refused: {0}")]
    Refused(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("not a system of curves: {0}")]
    NotASystem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for this error: 1 domain, 2 size guard, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeGuard { .. } => 2,
            Error::Io(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn guard(length: impl Into<BigUint>, guard: u64) -> Self {
        Error::SizeGuard { length: length.into(), guard }
    }
}
