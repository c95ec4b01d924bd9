//! Synthesis and verification of maximum-gap penalty Ising models.
//!
//! A penalty model represents a boolean constraint as an Ising energy
//! function on a small working subgraph: designated feasible states reach
//! energy exactly 0 (each with an ancilla witness), every other state costs
//! at least the model's *gap*, and the gap is maximized subject to
//! coefficient bounds. A three-level fault variant additionally pins a set
//! of single-fault states at an intermediate energy `e`.
//!
//! Synthesis maximizes the gap by bisection; each fixed-gap feasibility
//! subproblem searches witness ancilla assignments depth-first (greedy
//! candidate order, full backtracking) and checks each candidate set with a
//! linear program over the coefficients. All certificates are exhaustive:
//! every returned model has been enumerated state-by-state.
//!
//! Synthesis calls are pure and take only shared references, so callers may
//! parallelize across placements and constraints freely.

mod error;
mod library;
mod placement;
mod synth;
mod verify;

pub use error::PenaltyError;
pub use library::{signature_key, PenaltyLibrary};
pub use placement::{
    automorphisms, enumerate_placements, enumerate_placements_roles, Placement,
};
pub use synth::{
    reify, synthesize_faulty_penalty, synthesize_implicit_fault, synthesize_penalty,
    PenaltyModel, GAP_TOL, SYNTH_LIMIT,
};
pub use verify::{verify_penalty, GapReport};
