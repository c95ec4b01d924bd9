use thiserror::Error;

/// Errors from region construction, partitioning, and the two message-passing
/// solvers.
#[derive(Debug, Error)]
pub enum DecompError {
    /// Malformed region graph, beliefs, or parameters.
    #[error("invalid input: {0}")]
    BadInput(String),

    /// No partition within the region-count cap fits the qubit budget.
    #[error("partitioning failed: {0}")]
    Partition(String),

    /// A region minimizer or sampler could not produce a result.
    #[error("oracle failed on region {region}: {reason}")]
    Oracle { region: usize, reason: String },

    #[error(transparent)]
    Ising(#[from] ising_core::IsingError),

    #[error(transparent)]
    Sampler(#[from] samplers::SamplerError),

    #[error(transparent)]
    Embed(#[from] embedder::EmbedError),
}
