//! Locally-structured embedding of constraint networks onto hardware
//! graphs.
//!
//! Each constraint owns a contiguous block of hardware vertices (chosen
//! from a set of candidate placements), and every logical variable shared
//! between constraints is realized as a *chain*: a connected set of
//! vertices joining its occurrences. This crate provides the four layers
//! of that pipeline:
//!
//! - [`steiner_mst`]: weighted Steiner-tree approximation used to build
//!   chains, with an exact oracle ([`exact_steiner_vertices`]) for tests;
//! - [`bcr_lower_bound`]: LP relaxation of the bidirected-cut Steiner
//!   formulation, giving certified per-variable chain-size lower bounds;
//! - [`route`] / [`optimal_route_search`]: congestion-negotiated routing
//!   of disjoint chains and a bound-guided binary search for the smallest
//!   feasible chain-size cap;
//! - [`rip_up_and_replace`]: the combined place-and-route loop that
//!   negotiates constraint locations and chains simultaneously under an
//!   exponential congestion price.
//!
//! All algorithms are deterministic given their seed.

mod bounds;
mod dijkstra;
mod embedding;
mod error;
mod place;
mod route;
mod steiner;

pub use bounds::{bcr_lower_bound, ChainBounds, TerminalSets};
pub use dijkstra::vertex_dijkstra;
pub use embedding::{validate_embedding, ConstraintPlacement, Embedding, ValidationReport};
pub use error::EmbedError;
pub use place::{
    cell_candidates, rip_up_and_replace, trim, Candidate, CellFootprint, ConstraintSpec,
    PlaceOutcome, PlaceParams,
};
pub use route::{optimal_route_search, route, route_with, Chains, RouteParams, RouteSearch};
pub use steiner::{exact_steiner_vertices, steiner_mst};
