use super::maps::apply_step;
use super::trace::{Outcome, PurificationTrace, StepRecord, DIVERGENCE_STREAK};
use super::{Schedule, Step};
use crate::dense::{ghz_decompose, step_density, DensityOperator};
use crate::error::{Error, Result};
use crate::ghz::{DiagonalState, PureCatState};

/// Largest party count accepted by [`run_pure_experiment`].
pub const MAX_PURE_PARTIES: usize = 6;

/// Generic stopping logic shared by every iterated protocol in the crate.
///
/// `step_fn` returns the next state and its keep probability; `fidelity`
/// reads the target fidelity of a state.
pub(crate) fn drive<S>(
    initial: S,
    accuracy: f64,
    max_iterations: usize,
    mut step_fn: impl FnMut(usize, &S) -> Result<(S, f64, Step)>,
    fidelity: impl Fn(&S) -> f64,
) -> Result<(S, Vec<StepRecord>, Outcome)> {
    let start = fidelity(&initial);
    let mut state = initial;
    let mut records = Vec::new();
    if 1.0 - start < accuracy {
        return Ok((state, records, Outcome::Converged));
    }
    let mut previous = start;
    let mut streak = 0;
    for j in 0..max_iterations {
        let (next, keep_prob, step) = match step_fn(j, &state) {
            Ok(v) => v,
            Err(Error::Annihilated) => return Ok((state, records, Outcome::Annihilated)),
            Err(e) => return Err(e),
        };
        let f = fidelity(&next);
        records.push(StepRecord {
            step,
            fidelity: f,
            keep_prob,
        });
        state = next;
        if 1.0 - f < accuracy {
            return Ok((state, records, Outcome::Converged));
        }
        if f <= previous + 1e-15 && f < start {
            streak += 1;
            if streak >= DIVERGENCE_STREAK {
                return Ok((state, records, Outcome::Diverged));
            }
        } else {
            streak = 0;
        }
        previous = f;
    }
    Ok((state, records, Outcome::MaxIterations))
}

/// Runs `schedule` on a GHZ-diagonal ensemble with the fast maps.
pub fn iterate(state: &DiagonalState, schedule: &Schedule) -> Result<PurificationTrace> {
    let initial_fidelity = state.fidelity();
    let (last, records, outcome) = drive(
        state.clone(),
        schedule.accuracy(),
        schedule.max_iterations(),
        |j, s| {
            let step = schedule.step_at(j);
            apply_step(s, step).map(|(next, keep)| (next, keep, step))
        },
        DiagonalState::fidelity,
    )?;
    Ok(PurificationTrace::from_records(
        initial_fidelity,
        records,
        outcome,
        last,
    ))
}

fn phi_plus_fidelity(rho: &DensityOperator) -> f64 {
    let last = rho.dim() - 1;
    0.5 * (rho.get(0, 0) + rho.get(last, last) + rho.get(0, last) + rho.get(last, 0))
}

/// Runs `schedule` on an ensemble of `a|0⋯0⟩ + b|1⋯1⟩` with the dense
/// simulator; the input carries coherence between `|φ+⟩` and `|φ−⟩`, so the
/// diagonal maps do not apply.
pub fn run_pure_experiment(
    n_parties: usize,
    a: f64,
    schedule: &Schedule,
) -> Result<PurificationTrace> {
    if n_parties > MAX_PURE_PARTIES {
        return Err(Error::TooLarge {
            n: n_parties,
            limit: MAX_PURE_PARTIES,
        });
    }
    let cat = PureCatState::new(n_parties, a)?;
    let rho = DensityOperator::from_pure(&cat.amplitudes())?;
    let initial_fidelity = phi_plus_fidelity(&rho);
    let (last, records, outcome) = drive(
        rho,
        schedule.accuracy(),
        schedule.max_iterations(),
        |j, r| {
            let step = schedule.step_at(j);
            step_density(r, step).map(|(next, keep)| (next, keep, step))
        },
        phi_plus_fidelity,
    )?;
    let (final_state, _) = ghz_decompose(&last)?;
    Ok(PurificationTrace::from_records(
        initial_fidelity,
        records,
        outcome,
        final_state,
    ))
}
