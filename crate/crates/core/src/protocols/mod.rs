//! Fast P1/P2 maps on GHZ-diagonal weights and the iteration driver.

mod iterate;
mod maps;
mod schedule;
mod trace;

pub(crate) use iterate::drive;
pub use iterate::{iterate, run_pure_experiment, MAX_PURE_PARTIES};
pub use maps::{
    apply_step, p1_engine, p1_map, p2_map, P1Engine, TensorBuild, TensorEntry, TransitionTensor,
    MAX_TENSOR_PARTIES, SELF_TEST_SAMPLES, SELF_TEST_TOLERANCE,
};
pub use schedule::{Schedule, Step, DEFAULT_ACCURACY, DEFAULT_MAX_ITERATIONS};
pub use trace::{efficiency, Outcome, PurificationTrace, StepRecord, DIVERGENCE_STREAK};
