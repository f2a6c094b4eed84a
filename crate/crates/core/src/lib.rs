//! Average fidelity of single-qubit maps against an ideal unitary or
//! anti-unitary operation.
//!
//! The reference estimator averages the state fidelity over the six cardinal
//! pure states. The Pauli trace formula, tetrahedron and rotated-octahedron
//! probe sets, Gauss–Legendre quadrature over the Bloch sphere, and Monte
//! Carlo sampling compute the same quantity by independent routes.

pub mod channels;
pub mod cli;
pub mod error;
pub mod fidelity;
pub mod input;
pub mod linalg;
pub mod numfmt;
pub mod pulses;
pub mod sample;
pub mod states;

pub use error::{Error, Result};
