use thiserror::Error;

pub type Result<T, E = KdiamError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KdiamError {
    /// A value left the representable range of the working precision.
    #[error("range error: {0}")]
    Range(String),
    /// An operation was applied outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error at offset {location}: {message}")]
    Parse { location: usize, message: String },
    /// Caller supplied arguments violating a precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),
    #[error("bounded set is unbounded at grade {grade}: {detail}")]
    Unbounded { grade: u32, detail: String },
    /// A Köthe matrix failed validation; `grade`/`index` locate the witness.
    #[error("invalid matrix at grade {grade}, index {index}: {detail}")]
    InvalidMatrix {
        grade: u32,
        index: u64,
        detail: String,
    },
    #[error("oracle refused: {0}")]
    OracleBounds(String),
    #[error("io error: {0}")]
    Io(String),
}

impl KdiamError {
    pub fn is_parse(&self) -> bool {
        matches!(self, KdiamError::Parse { .. })
    }
}

impl From<std::io::Error> for KdiamError {
    fn from(e: std::io::Error) -> Self {
        KdiamError::Io(e.to_string())
    }
}
