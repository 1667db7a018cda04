//! Statevector simulation of quantum phase estimation and phase difference
//! estimation for second-quantized molecular Hamiltonians.
//!
//! The pipeline runs FCIDUMP integrals through a Jordan-Wigner Pauli sum,
//! Trotterized or exact time evolution and the estimation circuits, then
//! decodes ancilla distributions into energies or energy gaps.

pub mod analysis;
pub mod circuits;
pub mod error;
pub mod evolution;
pub mod fcidump;
pub mod fermion;
pub mod linalg;
pub mod pauli;
pub mod state_prep;
pub mod statevector;

pub use error::{Error, Result};

/// Hartree to electronvolt.
pub const HARTREE_TO_EV: f64 = 27.211386245988;
