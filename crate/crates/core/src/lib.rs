//! Two exchange-coupled electron-spin qubits with asymmetric anisotropic
//! (Dzyaloshinskii-Moriya) exchange.
//!
//! The crate builds the two-spin Hamiltonian, the local frame rotation `T`
//! that maps it onto the isotropic Heisenberg form, gates synthesized in the
//! rotated frame (swap, square-root swap, CNOT, phase-shifted swap) and the
//! fidelity / gate-error analysis used to compare against the fault-tolerance
//! threshold.
//!
//! Units: `ħ = 1`, spin operators are `S = σ/2`, and magnetic fields carry
//! energy units (`g μ_B` absorbed into the field magnitude). The two-qubit
//! basis is `{|00⟩, |01⟩, |10⟩, |11⟩}` with qubit 1 as the left factor.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod frame;
pub mod gates;
pub mod model;
pub mod spinalg;

pub use error::{Error, Result};
pub use model::{ExchangeParams, FieldSpec, Orientation};
pub use spinalg::{ComplexMatrix, StateVector};

/// Fault-tolerance threshold the gate errors are compared against.
pub const FAULT_TOLERANCE_THRESHOLD: f64 = 1e-6;
