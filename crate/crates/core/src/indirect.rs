//! Purification of `N`-party states through two-particle purification.
//!
//! The ensemble is split into `N − 1` sub-ensembles. In sub-ensemble `i`
//! every party except 1 and `i` is measured in the χ± basis, leaving a Bell
//! pair between parties 1 and `i`. Each pair family is purified with a
//! two-particle recurrence protocol, and the purified pairs are joined back
//! into one `N`-party GHZ state by party 1.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::dense::{chi_measure_reduce, extend_ghz};
use crate::error::{Error, Result};
use crate::ghz::{check_parties, BellDiagonalState, DiagonalState, MAX_PARTIES};
use crate::protocols::{drive, p2_map, Outcome, Step, DEFAULT_ACCURACY, DEFAULT_MAX_ITERATIONS};

/// Reduced pairs at or below this fidelity cannot be distilled.
const PAIR_FIDELITY_FLOOR: f64 = 0.5 + 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
pub enum TwoParticleProtocol {
    /// Bilateral ±π/2 rotations before the CNOT round.
    #[default]
    Dejmps,
    /// Depolarizing twirl to a Werner state before the CNOT round.
    Bbpssw,
}

impl fmt::Display for TwoParticleProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwoParticleProtocol::Dejmps => "dejmps",
            TwoParticleProtocol::Bbpssw => "bbpssw",
        })
    }
}

impl FromStr for TwoParticleProtocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dejmps" => Ok(Self::Dejmps),
            "bbpssw" => Ok(Self::Bbpssw),
            other => Err(Error::Unknown {
                kind: "two-particle protocol",
                value: other.to_string(),
            }),
        }
    }
}

/// The bilateral rotation of the DEJMPS round exchanges `|φ−⟩` and `|ψ−⟩`
/// and fixes `|φ+⟩`, `|ψ+⟩`.
pub fn dejmps_rotate(state: &BellDiagonalState) -> BellDiagonalState {
    let mut w = state.weights();
    w.swap(BellDiagonalState::PHI_MINUS, BellDiagonalState::PSI_MINUS);
    BellDiagonalState::from_raw(w)
}

/// One recurrence round on two copies of a Bell-diagonal pair.
///
/// After the variant's preprocessing the round is a bilateral CNOT with
/// agreement post-selection, i.e. the two-party case of P2.
pub fn two_particle_step(
    state: &BellDiagonalState,
    variant: TwoParticleProtocol,
) -> Result<(BellDiagonalState, f64)> {
    let prepared = match variant {
        TwoParticleProtocol::Dejmps => dejmps_rotate(state),
        TwoParticleProtocol::Bbpssw => state.twirled(),
    };
    let (out, keep) = p2_map(&prepared.to_diagonal())?;
    Ok((BellDiagonalState::from_diagonal(&out)?, keep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndirectConfig {
    pub accuracy: f64,
    pub max_iterations: usize,
    pub variant: TwoParticleProtocol,
}

impl Default for IndirectConfig {
    fn default() -> Self {
        Self {
            accuracy: DEFAULT_ACCURACY,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            variant: TwoParticleProtocol::Dejmps,
        }
    }
}

/// Purification history of the pair shared by party 1 and `partner`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTrace {
    pub partner: usize,
    /// Pair right after the χ± reduction.
    pub reduced: BellDiagonalState,
    pub fidelities: Vec<f64>,
    pub keep_probs: Vec<f64>,
    pub outcome: Outcome,
    pub purified: BellDiagonalState,
}

impl PairTrace {
    pub fn iterations(&self) -> usize {
        self.keep_probs.len()
    }

    /// `P_J`.
    pub fn survival(&self) -> f64 {
        self.keep_probs.iter().product()
    }

    /// `P_J / 2^J`.
    pub fn efficiency(&self) -> f64 {
        self.survival() * 0.5f64.powi(self.iterations() as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndirectTrace {
    pub n_parties: usize,
    pub pairs: Vec<PairTrace>,
    pub outcome: Outcome,
    /// GHZ-diagonal state rebuilt from the purified pairs.
    pub recombined: Option<DiagonalState>,
    /// `(P_J / 2^J) / (N − 1)`, worst pair.
    pub normalized_efficiency: Option<f64>,
    /// `P_J / (N − 1)`, worst pair.
    pub normalized_survival: Option<f64>,
}

impl IndirectTrace {
    pub fn converged(&self) -> bool {
        self.outcome == Outcome::Converged
    }

    pub fn recombined_fidelity(&self) -> Option<f64> {
        self.recombined.as_ref().map(DiagonalState::fidelity)
    }

    /// Largest pair iteration count.
    pub fn iterations(&self) -> usize {
        self.pairs
            .iter()
            .map(PairTrace::iterations)
            .max()
            .unwrap_or(0)
    }
}

fn purify_pair(
    partner: usize,
    reduced: BellDiagonalState,
    config: &IndirectConfig,
) -> Result<PairTrace> {
    if reduced.fidelity() <= PAIR_FIDELITY_FLOOR {
        return Ok(PairTrace {
            partner,
            reduced,
            fidelities: vec![],
            keep_probs: vec![],
            outcome: Outcome::Diverged,
            purified: reduced,
        });
    }
    let (purified, records, outcome) = drive(
        reduced,
        config.accuracy,
        config.max_iterations,
        |_, s| two_particle_step(s, config.variant).map(|(next, keep)| (next, keep, Step::P2)),
        BellDiagonalState::fidelity,
    )?;
    Ok(PairTrace {
        partner,
        reduced,
        fidelities: records.iter().map(|r| r.fidelity).collect(),
        keep_probs: records.iter().map(|r| r.keep_prob).collect(),
        outcome,
        purified,
    })
}

/// Full indirect route for an `N ≥ 3` party GHZ-diagonal ensemble.
pub fn indirect_pipeline(state: &DiagonalState, config: &IndirectConfig) -> Result<IndirectTrace> {
    let n = state.n_parties();
    if n < 3 {
        return Err(Error::PartyCount {
            n,
            min: 3,
            max: MAX_PARTIES,
        });
    }
    let pairs = (2..=n)
        .map(|partner| purify_pair(partner, chi_measure_reduce(state, partner)?, config))
        .collect::<Result<Vec<_>>>()?;

    let outcome = [
        Outcome::Diverged,
        Outcome::Annihilated,
        Outcome::MaxIterations,
    ]
    .into_iter()
    .find(|o| pairs.iter().any(|p| p.outcome == *o))
    .unwrap_or(Outcome::Converged);

    let mut trace = IndirectTrace {
        n_parties: n,
        pairs,
        outcome,
        recombined: None,
        normalized_efficiency: None,
        normalized_survival: None,
    };
    if outcome == Outcome::Converged {
        let mut ghz = trace.pairs[0].purified.to_diagonal();
        for pair in &trace.pairs[1..] {
            ghz = extend_ghz(&ghz, &pair.purified)?;
        }
        let per_state = (n - 1) as f64;
        let worst = |f: fn(&PairTrace) -> f64| {
            trace.pairs.iter().map(f).fold(f64::INFINITY, f64::min) / per_state
        };
        trace.normalized_efficiency = Some(worst(PairTrace::efficiency));
        trace.normalized_survival = Some(worst(PairTrace::survival));
        trace.recombined = Some(ghz);
    }
    Ok(trace)
}

/// Lowest Werner fidelity purifiable by the indirect route:
/// `(2^{N−1} + 1) / (3 · 2^{N−1})`.
pub fn column_b_limit(n_parties: usize) -> Result<Ratio<u64>> {
    check_parties(n_parties)?;
    let half = 1u64 << (n_parties - 1);
    Ok(Ratio::new(half + 1, 3 * half))
}
