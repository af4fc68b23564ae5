//! Dense reference simulator.
//!
//! Every protocol is executed here gate by gate on real density operators
//! and serves as the ground truth that the fast label-space maps in
//! [`crate::protocols`] are checked against.

mod basis;
mod circuits;
mod operator;
pub(crate) mod statevector;

pub(crate) use basis::ghz_overlap;
pub use basis::{embed_diagonal, ghz_basis_vector, ghz_decompose, ghz_matrix};
pub use circuits::{
    chi_measure_reduce, depolarize_qubit, extend_ghz, recombine_ghz, run_protocol_step_dense,
    step_density, DenseStep, MAX_DENSE_PARTIES,
};
pub use operator::{DensityOperator, MeasurementRecord, ZERO_PROBABILITY};
