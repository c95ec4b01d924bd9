use thiserror::Error;

/// Errors from embedding, routing, and bound computations.
#[derive(Debug, Error)]
pub enum EmbedError {
    /// A variable has an empty terminal set.
    #[error("variable {var} has an empty terminal set")]
    EmptyTerminals { var: u32 },

    /// A vertex id is outside the graph.
    #[error("vertex {v} does not exist in a graph with {n} vertices")]
    UnknownVertex { v: u32, n: usize },

    /// Terminals of one variable lie in distinct components.
    #[error("terminals of variable {var} are not connected in the graph")]
    DisconnectedTerminals { var: u32 },

    /// A constraint was given no candidate placements.
    #[error("constraint {constraint} has no candidate placements")]
    NoCandidates { constraint: usize },

    /// The place-and-route loop exhausted its budget without reaching
    /// multiplicity one.
    #[error(
        "place-and-route failed: best vertex multiplicity {best_multiplicity} \
         after {iterations} iterations"
    )]
    PlacementFailed {
        best_multiplicity: u32,
        iterations: usize,
    },

    /// Malformed constraint specification.
    #[error("bad constraint specification: {0}")]
    BadSpec(String),

    /// Malformed embedding text.
    #[error("embedding parse error at line {line_no}: {msg}")]
    BadFormat { line_no: usize, msg: String },

    /// LP failure inside the bound computation.
    #[error("linear program failed: {0}")]
    Lp(#[from] linprog::LpError),

    /// Model-layer failure.
    #[error(transparent)]
    Ising(#[from] ising_core::IsingError),
}
