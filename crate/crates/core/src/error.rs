use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum IakError {
    #[error("invalid word: letter {letter} outside 1..={alphabet}")]
    InvalidWord { letter: usize, alphabet: usize },

    #[error("map has no point action (abstract Lipschitz constants only)")]
    NoPointAction,

    #[error("word budget exceeded: {needed} composites requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: usize },

    #[error("series diverges: sum of first-level Lip+ powers is {level_sum} >= 1 at t = {t}")]
    SeriesDiverges { t: f64, level_sum: f64 },

    #[error("wrong map variant: {0}")]
    WrongVariant(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("condensation set is not full-dimensional")]
    NotFullDimensional,

    #[error("separation condition not asserted: {0}")]
    MissingAssertion(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, IakError>;

impl From<std::io::Error> for IakError {
    fn from(e: std::io::Error) -> Self {
        IakError::Io(e.to_string())
    }
}
