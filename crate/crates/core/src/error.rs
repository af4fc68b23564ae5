use thiserror::Error;

use crate::protocols::Outcome;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("party count {n} is outside the supported range {min}..={max}")]
    PartyCount { n: usize, min: usize, max: usize },

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("labels belong to different party counts ({0} vs {1})")]
    MismatchedParties(usize, usize),

    #[error("malformed Pauli string {0:?}")]
    MalformedPauli(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("qubit {0} is used twice")]
    DuplicateQubit(usize),

    #[error("operator dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dense two-copy simulation refused for N = {n}: limit is N = {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("ensemble annihilated: keep probability is zero")]
    Annihilated,

    #[error("efficiency is undefined for a trace that ended as {0:?}")]
    NotConverged(Outcome),

    #[error("no threshold: {0}")]
    NoThreshold(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown {kind} {value:?}")]
    Unknown { kind: &'static str, value: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            lo: 0.0,
            hi: 1.0,
        })
    }
}
