use thiserror::Error;

/// Errors raised by the counting, enumeration, channel and reconstruction routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated in {op}: {reason}")]
    Precondition { op: &'static str, reason: String },

    #[error("arithmetic overflow in the chosen count type")]
    Overflow,

    #[error("symbol {symbol} out of range for alphabet size {q}")]
    SymbolOutOfRange { symbol: u32, q: u32 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("alphabet mismatch: expected q={expected}, found q={found}")]
    AlphabetMismatch { expected: u32, found: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("enumeration cap exceeded: {size} > {cap}")]
    CapExceeded { size: String, cap: usize },

    #[error("ball size {size} is smaller than the {requested} requested distinct outputs")]
    BallTooSmall { size: String, requested: usize },

    #[error("below threshold: {have} distinct inputs, at least {needed} required")]
    BelowThreshold { have: usize, needed: String },

    #[error("no symbol wins every precedence comparison at position {position}")]
    NoFirstSymbol { position: usize },

    #[error("no burst count satisfies the class threshold at position {position}")]
    NoThresholdClass { position: usize },

    #[error("majority tie between symbol classes at position {position}")]
    MajorityTie { position: usize },

    #[error("expected a single remaining word at position {position}, found {count}")]
    NotSingleton { position: usize, count: usize },

    #[error("no candidate is consistent with every input")]
    NoCandidate,

    #[error("{count} candidates are consistent with every input")]
    MultipleCandidates { count: usize },

    #[error("reconstructed word is inconsistent with input {word}")]
    Inconsistent { word: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Precondition {
        op,
        reason: reason.into(),
    }
}
