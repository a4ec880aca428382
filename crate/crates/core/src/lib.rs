//! Quantum annealing with an ancilla-pair driver whose pair parities are
//! conserved, simulated as an open system under the adiabatic Lindblad
//! master equation with a shared Ohmic reservoir.
//!
//! Units: energies and rates in rad/ns with ħ = 1, times in ns.

pub mod bath;
pub mod eigen;
pub mod error;
pub mod linalg;
pub mod master;
pub mod model;
pub mod propagate;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{kron, pauli_on, Axis, ComplexMatrix, C64};
