//! Threshold searches, channel models, reduced-fidelity formulas and the
//! direct-versus-indirect efficiency sweep.

mod channel;
mod family;
mod formulas;
mod sweep;
mod threshold;

pub use channel::{channel_global_depolarize, channel_local_pauli};
pub use family::{make_perturbed_werner, StateFamily, DEFAULT_JITTER};
pub use formulas::reduced_fidelity_formula;
pub use sweep::{
    default_grid, efficiency_sweep, parse_grid, DirectPoint, EfficiencyMeasure, IndirectPoint,
    SweepRow,
};
pub use threshold::{
    find_indirect_threshold, find_threshold, ThresholdResult, DEFAULT_BRACKET_TOLERANCE,
};
