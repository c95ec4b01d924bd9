use thiserror::Error;

#[derive(Debug, Error)]
pub enum PenaltyError {
    #[error("subgraph has {m} vertices; {what} supports at most {limit}")]
    TooManyVertices {
        m: usize,
        what: &'static str,
        limit: usize,
    },

    #[error("invalid placement: {0}")]
    BadPlacement(String),

    #[error("invalid state sets: {0}")]
    BadStates(String),

    #[error("no model with gap >= {min_gap} exists on this subgraph under the given bounds")]
    NotRepresentable { min_gap: f64 },

    #[error("state {state:#b} at level {expected} has minimum energy {energy}")]
    LevelCertificate {
        state: u64,
        energy: f64,
        expected: f64,
    },

    #[error("gap certificate failed: realized gap {realized} below required {required}")]
    GapBelow { realized: f64, required: f64 },

    #[error("fault level must satisfy 0 < e <= gap; got e={e}, gap={gap}")]
    FaultLevel { e: f64, gap: f64 },

    #[error("penalty library: {0}")]
    Library(String),

    #[error(transparent)]
    Lp(#[from] linprog::LpError),

    #[error(transparent)]
    Ising(#[from] ising_core::IsingError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
