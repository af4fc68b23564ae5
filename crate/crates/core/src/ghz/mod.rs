//! GHZ-basis labels, the diagonal state families and exact label algebra.

mod label;
mod state;

pub(crate) use label::check_parties;
pub use label::{mcnot_labels, pauli_act, GhzLabel, Pauli, PauliString, MAX_PARTIES};
pub use state::{BellDiagonalState, DiagonalState, PureCatState, NORMALIZATION_TOL};
