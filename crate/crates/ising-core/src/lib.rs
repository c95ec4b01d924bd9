//! Core types for compiling constraint problems onto hardware-structured
//! Ising models.
//!
//! An Ising model assigns each spin configuration `z ∈ {-1,+1}^n` the energy
//!
//! ```text
//! E(z) = offset + Σ_i h_i z_i + Σ_{i<j} J_ij z_i z_j
//! ```
//!
//! This crate holds the model itself, the parameter-bound description of a
//! target device, the Chimera hardware graph, boolean constraint (CSP) types
//! with their spin encoding, model composition over an embedding, and the
//! plain-text interchange format. Everything here is a value type: operations
//! return new values and never mutate shared state.
//!
//! The numeric types are generic over the scalar via [`Scalar`] (any
//! `num_traits::Float`, in practice `f32` or `f64`); the rest of the
//! workspace uses the `f64` aliases exported at the crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

mod compose;
mod csp;
mod error;
mod graph;
mod io;
mod model;

pub use compose::{compose_embedded, ChainMap, Composed};
pub use csp::{
    bits_to_spins, spins_to_bits, Assignment, Constraint, Csp, Tuple,
};
pub use error::IsingError;
pub use graph::{chimera, ChimeraCoord, HardwareGraph, SimpleGraph};
pub use io::{parse_ising, read_ising, write_ising};
pub use model::{IsingModel, ParameterBounds, Spin, SpinConfig};

/// Scalar type for model coefficients and energies.
///
/// Implemented for `f32` and `f64` via the blanket impl; the crate-root
/// aliases fix `f64`, which is what the solver layers above use.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Display
    + Debug
    + Default
    + Copy
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Display
        + Debug
        + Default
        + Copy
        + Send
        + Sync
        + 'static
{
}

/// Double-precision Ising model (the workspace default).
pub type IsingModel64 = IsingModel<f64>;
/// Single-precision Ising model.
pub type IsingModel32 = IsingModel<f32>;
/// Double-precision parameter bounds.
pub type ParameterBounds64 = ParameterBounds<f64>;
