use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Gamma evaluated at 0, -1, -2, ...
    #[error("Gamma function pole at x = {0}")]
    Pole(f64),

    /// Gauss summation requires c - a - b > 0.
    #[error("hypergeometric series 2F1({a}, {b}; {c}; 1) diverges (c - a - b = {excess} <= 0)")]
    Divergent { a: f64, b: f64, c: f64, excess: f64 },

    #[error("dimension mismatch: {what} has {got} entries, expected {expected}")]
    Dimension {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("insufficient history: need {needed} past values, have {available}")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("season {season} has zero sample variance")]
    ZeroVariance { season: usize },

    #[error("{0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
