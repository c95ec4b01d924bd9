//! Classical solvers and samplers for Ising models.
//!
//! Four layers:
//!
//! - **Exact solving** ([`exact_ground_states`], [`exact_boltzmann_marginals`])
//!   by bucket elimination along a low-width [`EliminationOrder`] (min-fill
//!   by default, budget [`WIDTH_BUDGET`]): exact minima with exhaustive
//!   ground-state enumeration, and exact log-space Boltzmann marginals with
//!   log Z — stable down to temperatures far below the spectral gap.
//! - **Stochastic sampling** ([`sa_sample`]) by Metropolis sweeps under a
//!   geometric [`Schedule`]; every read is deterministic given
//!   `(seed, read index)`. [`sa_sample_gauged`] samples under a
//!   spin-reversal transform and maps the results back.
//! - **Decoding** ([`majority_vote_decode`]) from hardware chains to logical
//!   variables, and **descent** ([`greedy_descent_ising`],
//!   [`greedy_descent_csp`]) to polish samples into local minima.
//! - **Bookkeeping**: [`SampleSet`] aggregates reads with their energies and
//!   round-trips through a plain-text format; [`st99`] converts a success
//!   fraction into an expected samples-to-solution count.

mod decode;
mod elim;
mod error;
mod exact;
mod sa;
mod sampleset;
mod table;

pub use decode::{
    greedy_descent_csp, greedy_descent_ising, majority_vote_decode, st99, ChainMap, DecodeStats,
};
pub use elim::{EliminationOrder, WIDTH_BUDGET};
pub use error::SamplerError;
pub use exact::{
    exact_boltzmann_marginals, exact_ground_states, GroundStates, Marginals, GROUND_STATE_CAP,
};
pub use sa::{sa_configs, sa_sample, sa_sample_gauged, Schedule};
pub use sampleset::{SampleMeta, SampleRow, SampleSet};
