//! Simulation of multiparticle entanglement purification.
//!
//! The crate works with ensembles of `N`-party states that are diagonal in the
//! GHZ basis `|Ψ_{k,s}⟩ = (|0,k⟩ + (−1)^s |1,k̄⟩)/√2`. Two recurrence steps act
//! directly on such ensembles:
//!
//! * **P1**: Hadamard on every qubit of two copies, party-wise CNOT from the
//!   control copy to the target copy, keep if an even number of target qubits
//!   read `1`, Hadamard on the surviving control copy.
//! * **P2**: party-wise CNOT, keep if all target qubits agree.
//!
//! The [`protocols`] module holds fast quadratic maps for both steps and the
//! iteration driver; [`dense`] executes the same circuits literally on dense
//! density operators and serves as the reference for everything else.
//! [`indirect`] implements the comparison route through two-particle
//! purification, and [`analysis`] ties it together into threshold searches,
//! channel models and efficiency sweeps.
//!
//! ```
//! use multipure::{DiagonalState, protocols::{iterate, Schedule}};
//!
//! let state = DiagonalState::werner_with_fidelity(3, 0.6).unwrap();
//! let trace = iterate(&state, &Schedule::alternating()).unwrap();
//! assert!(trace.converged());
//! ```

#![forbid(unsafe_code)]

pub mod analysis;
pub mod dense;
mod error;
pub mod ghz;
pub mod indirect;
pub mod protocols;

pub use error::{Error, Result};
pub use ghz::{BellDiagonalState, DiagonalState, GhzLabel, Pauli, PauliString, PureCatState};
pub use protocols::{Outcome, PurificationTrace, Schedule, Step};
