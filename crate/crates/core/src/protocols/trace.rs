use serde::Serialize;

use super::Step;
use crate::error::{Error, Result};
use crate::ghz::DiagonalState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    /// `1 − f` fell below the schedule accuracy.
    Converged,
    /// Fidelity stayed below its starting value without improving for
    /// [`DIVERGENCE_STREAK`] consecutive steps.
    Diverged,
    /// A step had zero keep probability.
    Annihilated,
    MaxIterations,
}

/// Consecutive non-improving steps below the initial fidelity that count as divergence.
pub const DIVERGENCE_STREAK: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: Step,
    /// Fidelity after the step.
    pub fidelity: f64,
    pub keep_prob: f64,
}

/// Per-iteration history of one purification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurificationTrace {
    initial_fidelity: f64,
    records: Vec<StepRecord>,
    survival: f64,
    outcome: Outcome,
    final_state: DiagonalState,
}

impl PurificationTrace {
    pub fn from_records(
        initial_fidelity: f64,
        records: Vec<StepRecord>,
        outcome: Outcome,
        final_state: DiagonalState,
    ) -> Self {
        let survival = records.iter().map(|r| r.keep_prob).product();
        Self {
            initial_fidelity,
            records,
            survival,
            outcome,
            final_state,
        }
    }

    pub fn initial_fidelity(&self) -> f64 {
        self.initial_fidelity
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    /// `J`, the number of steps executed.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// `P_J`, the product of all keep probabilities.
    pub fn survival(&self) -> f64 {
        self.survival
    }

    /// Running products `P_1, …, P_J`.
    pub fn cumulative_survival(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().scan(1.0, |p, r| {
            *p *= r.keep_prob;
            Some(*p)
        })
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    pub fn converged(&self) -> bool {
        self.outcome == Outcome::Converged
    }

    pub fn final_fidelity(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_fidelity, |r| r.fidelity)
    }

    /// GHZ-diagonal part of the last state.
    pub fn final_state(&self) -> &DiagonalState {
        &self.final_state
    }

    /// `P_J / 2^J`; only defined for converged runs.
    pub fn efficiency(&self) -> Result<f64> {
        if !self.converged() {
            return Err(Error::NotConverged(self.outcome));
        }
        Ok(self.survival * 0.5f64.powi(self.iterations() as i32))
    }
}

/// `P_J / 2^J` of a converged trace.
pub fn efficiency(trace: &PurificationTrace) -> Result<f64> {
    trace.efficiency()
}
