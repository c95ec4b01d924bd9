use thiserror::Error;

/// Errors raised by the core model, graph, and format types.
#[derive(Debug, Error)]
pub enum IsingError {
    #[error("vertex {0} out of range (model has {1} vertices)")]
    VertexOutOfRange(u32, usize),

    #[error("invalid edge ({0}, {1}): {2}")]
    InvalidEdge(u32, u32, &'static str),

    #[error("configuration length {0} does not match model size {1}")]
    ConfigLength(usize, usize),

    #[error("coefficient {name}[{index}] = {value} outside bounds [{lo}, {hi}]")]
    OutOfBounds {
        name: &'static str,
        index: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter bounds: {0}")]
    InvalidBounds(String),

    #[error("chains for variables {0} and {1} share vertex {2}")]
    ChainOverlap(u32, u32, u32),

    #[error("chain for variable {0} is not connected in the hardware graph")]
    ChainDisconnected(u32),

    #[error("penalty parts {0} and {1} both carry coefficients on vertex {2}")]
    PartOverlap(usize, usize, u32),

    #[error("part {0} places a coupler on ({1}, {2}), which is not a hardware edge")]
    PartEdgeMissing(usize, u32, u32),

    #[error("constraint is malformed: {0}")]
    BadConstraint(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
