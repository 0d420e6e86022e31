use std::fmt;

/// Location-tagged failure from one of the text decoders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed category: {0}")]
    Malformed(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("not an object: {0}")]
    NotAnObject(String),
    #[error("quiver is not left rooted")]
    NotLeftRooted,
    #[error("stage {stage} is out of range (the rooted sequence has {zeta} stages)")]
    StageOutOfRange { stage: usize, zeta: usize },
    #[error("truncation boundary: {0}")]
    Boundary(String),
    #[error("naturality fails at arrow {arrow}")]
    Naturality { arrow: u32 },
    #[error("invalid cleavage: {0}")]
    Cleavage(String),
    #[error("non-commuting square: {0}")]
    NonCommutingSquare(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
