use crate::wordcore::Word;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size {0} is outside the supported range 0..=26")]
    AlphabetSize(usize),
    #[error("letter {letter:?} is not part of an alphabet of {size} letters")]
    UnknownLetter { letter: char, size: usize },
    #[error("letter index {index} is out of range for an alphabet of {size} letters")]
    LetterIndex { index: usize, size: usize },
    #[error("malformed exponent in {token:?}")]
    MalformedExponent { token: String },
    #[error("exponent 0 is not allowed")]
    ZeroExponent,
    #[error("word length {len} exceeds the supported maximum {max}")]
    WordTooLong { len: usize, max: usize },
    #[error("operands use different alphabets ({left} vs {right} letters)")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("letter set does not belong to the word's alphabet")]
    NotSubset,
    #[error("words have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("matrix dimensions differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("exact count exceeds the 64-bit range; the word is too long for exact counting")]
    CountOverflow,
    #[error("operation requires a binary alphabet, got {0} letters")]
    NotBinary(usize),
    #[error("operation requires a ternary alphabet, got {0} letters")]
    NotTernary(usize),
    #[error("the class is a singleton: the word is M-unambiguous")]
    SingletonClass,
    #[error("rule occurrence does not apply to this word")]
    InvalidOccurrence,
    /// Search ran out of its node or time budget. `partial` holds the class
    /// members found so far; it is never silently passed off as complete.
    #[error("budget exhausted after {nodes} search nodes ({} partial members found)", partial.len())]
    BudgetExhausted { nodes: u64, partial: Vec<Word> },
}

pub type Result<T> = std::result::Result<T, Error>;
