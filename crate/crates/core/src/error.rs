use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("transition entry ({row}, {col}) is {value}, expected 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: i64 },

    #[error("transition matrix must be {expected}x{expected}, found a row of length {found}")]
    Shape { expected: usize, found: usize },

    #[error("alphabet must contain between 1 and 255 symbols, got {0}")]
    AlphabetSize(usize),

    #[error("duplicate symbol label `{0}`")]
    DuplicateSymbol(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol `{0}` has no successors")]
    NoSuccessors(String),

    #[error("symbol `{0}` has no predecessors")]
    NoPredecessors(String),

    #[error("word length must be positive")]
    EmptyWord,

    #[error("word `{0}` is not admissible")]
    Inadmissible(String),

    #[error("forbidden word `{word}` has length {found}, expected {expected}")]
    WordLength {
        word: String,
        expected: usize,
        found: usize,
    },

    #[error("forbidden set must hold one or two distinct words")]
    ForbidSetSize,

    #[error("transition {source_state} -> {target} is already absent")]
    EntryAlreadyZero { source_state: String, target: String },

    #[error("deletion sets differ in size ({rows} rows, {cols} columns)")]
    UnequalDeletion { rows: usize, cols: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("malformed bordered matrix: {0}")]
    MalformedBorder(String),

    #[error("zero polynomial has no roots to isolate")]
    ZeroPolynomial,

    #[error("no real root >= {0}")]
    NoRootAbove(f64),

    #[error("matrix dimension {dim} exceeds oracle cap {cap}")]
    OracleCap { dim: usize, cap: usize },

    #[error("spectral gap hypothesis fails: lambda0 = {0} is not > 1")]
    NoSpectralGap(f64),

    #[error("no spectral gap: another eigenvalue has modulus {second} against lambda0 = {lambda0}")]
    DominantTie { lambda0: f64, second: f64 },

    #[error("structural violation: {0}")]
    Structural(String),

    #[error("internal rank inconsistency: {0}")]
    Rank(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
