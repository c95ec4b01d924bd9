use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    /// The elimination order induces tables too large for exact solving.
    #[error("induced width {width} exceeds the exact-solver budget {budget}")]
    WidthExceeded { width: usize, budget: usize },

    /// An elimination order that is not a permutation of the variables.
    #[error("invalid elimination order: {0}")]
    BadOrder(String),

    /// A parameter outside its documented domain.
    #[error("{0}")]
    InvalidParam(String),

    /// Malformed sample-set text.
    #[error("sample format error at line {line}: {msg}")]
    BadFormat { line: usize, msg: String },

    /// Chains unusable for decoding (missing variables, bad vertex ids…).
    #[error("chain decode error: {0}")]
    BadChains(String),

    #[error(transparent)]
    Ising(#[from] ising_core::IsingError),
}
