use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Step;
use crate::dense::statevector::StateVector;
use crate::dense::{ghz_basis_vector, ghz_overlap, run_protocol_step_dense, MAX_DENSE_PARTIES};
use crate::error::{Error, Result};
use crate::ghz::{check_parties, DiagonalState, GhzLabel};

/// Largest party count for which the P1 transition tensor is precomputed.
pub const MAX_TENSOR_PARTIES: usize = 6;
/// Mixtures checked before the tensor fast path is trusted.
pub const SELF_TEST_SAMPLES: usize = 50;
/// Largest off-diagonal residue tolerated by the self-test.
pub const SELF_TEST_TOLERANCE: f64 = 1e-10;
const SELF_TEST_SEED: u64 = 0x5eed_0001;
const AMPLITUDE_CUTOFF: f64 = 1e-12;

/// P2 in closed form: keep iff `k1 = k2`, output label `(k, s1⊕s2)`.
///
/// `w'_{k,0} ∝ w_{k,0}² + w_{k,1}²`, `w'_{k,1} ∝ 2 w_{k,0} w_{k,1}`, and the
/// keep probability is `Σ_k (w_{k,0} + w_{k,1})²`.
pub fn p2_map(state: &DiagonalState) -> Result<(DiagonalState, f64)> {
    let w = state.weights();
    let mut out = vec![0.0; w.len()];
    for (pair, dst) in w.chunks_exact(2).zip(out.chunks_exact_mut(2)) {
        let (plus, minus) = (pair[0], pair[1]);
        dst[0] = plus * plus + minus * minus;
        dst[1] = 2.0 * plus * minus;
    }
    normalize_output(state.n_parties(), out)
}

/// P1 through the cached engine for `state.n_parties()`.
pub fn p1_map(state: &DiagonalState) -> Result<(DiagonalState, f64)> {
    p1_engine(state.n_parties())?.apply(state)
}

/// Applies `step` with the default engines.
pub fn apply_step(state: &DiagonalState, step: Step) -> Result<(DiagonalState, f64)> {
    match step {
        Step::P1 => p1_map(state),
        Step::P2 => p2_map(state),
    }
}

fn normalize_output(n: usize, mut out: Vec<f64>) -> Result<(DiagonalState, f64)> {
    let keep: f64 = out.iter().sum();
    if keep.is_nan() || keep <= 0.0 {
        return Err(Error::Annihilated);
    }
    out.iter_mut().for_each(|v| *v /= keep);
    Ok((DiagonalState::from_raw(n, out), keep))
}

/// One nonzero coefficient of a quadratic label map: the pair
/// `(control, target)` contributes `weight · w_control · w_target` to `output`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorEntry {
    pub control: u32,
    pub target: u32,
    pub output: u32,
    pub weight: f64,
}

/// Quadratic map on GHZ-diagonal weights, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTensor {
    n_parties: usize,
    entries: Vec<TensorEntry>,
}

/// Coherence `⟨Ψ_row|·|Ψ_col⟩` (row < col) left behind by one label pair.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Coherence {
    control: u32,
    target: u32,
    row: u32,
    col: u32,
    value: f64,
}

/// A freshly simulated tensor plus the coherences it had to drop.
#[derive(Debug, Clone)]
pub struct TensorBuild {
    pub tensor: TransitionTensor,
    coherences: Vec<Coherence>,
}

impl TransitionTensor {
    /// Simulates `step` on every pure label pair `|Ψ_a⟩⊗|Ψ_b⟩` and records
    /// the GHZ-basis content of the kept control copy.
    pub fn build(n_parties: usize, step: Step) -> Result<TensorBuild> {
        check_parties(n_parties)?;
        if n_parties > MAX_TENSOR_PARTIES {
            return Err(Error::TooLarge {
                n: n_parties,
                limit: MAX_TENSOR_PARTIES,
            });
        }
        let labels: Vec<GhzLabel> = GhzLabel::all(n_parties)?.collect();
        let vectors: Vec<Vec<f64>> = labels.iter().map(|&l| ghz_basis_vector(l)).collect();
        let per_control: Vec<(Vec<TensorEntry>, Vec<Coherence>)> = (0..labels.len())
            .into_par_iter()
            .map(|a| {
                let mut entries = Vec::new();
                let mut coherences = Vec::new();
                for b in 0..labels.len() {
                    let gram = simulate_pair(n_parties, step, &labels, &vectors[a], &vectors[b]);
                    for ((row, col), value) in gram {
                        if row == col {
                            entries.push(TensorEntry {
                                control: a as u32,
                                target: b as u32,
                                output: row as u32,
                                weight: value,
                            });
                        } else {
                            coherences.push(Coherence {
                                control: a as u32,
                                target: b as u32,
                                row: row as u32,
                                col: col as u32,
                                value,
                            });
                        }
                    }
                }
                (entries, coherences)
            })
            .collect();
        let mut entries = Vec::new();
        let mut coherences = Vec::new();
        for (e, c) in per_control {
            entries.extend(e);
            coherences.extend(c);
        }
        Ok(TensorBuild {
            tensor: TransitionTensor { n_parties, entries },
            coherences,
        })
    }

    pub fn from_entries(n_parties: usize, entries: Vec<TensorEntry>) -> Result<Self> {
        check_parties(n_parties)?;
        let dim = 1u32 << n_parties;
        if let Some(bad) = entries
            .iter()
            .find(|e| e.control >= dim || e.target >= dim || e.output >= dim || e.weight < 0.0)
        {
            return Err(Error::InvalidWeights(format!("bad tensor entry {bad:?}")));
        }
        Ok(Self { n_parties, entries })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn entries(&self) -> &[TensorEntry] {
        &self.entries
    }

    pub fn apply(&self, state: &DiagonalState) -> Result<(DiagonalState, f64)> {
        if state.n_parties() != self.n_parties {
            return Err(Error::MismatchedParties(state.n_parties(), self.n_parties));
        }
        let w = state.weights();
        let mut out = vec![0.0; w.len()];
        for e in &self.entries {
            out[e.output as usize] += e.weight * w[e.control as usize] * w[e.target as usize];
        }
        normalize_output(self.n_parties, out)
    }
}

/// Kept-branch Gram matrix `Σ_m g_m g_mᵀ` (upper triangle) of one label pair,
/// where `g_m` are the GHZ coefficients of the unnormalized control copy
/// after target outcome `m`.
fn simulate_pair(
    n: usize,
    step: Step,
    labels: &[GhzLabel],
    control: &[f64],
    target: &[f64],
) -> Vec<((usize, usize), f64)> {
    let mut psi = StateVector::kron(control, target);
    if step == Step::P1 {
        for q in 0..2 * n {
            psi.hadamard(q);
        }
    }
    for party in 0..n {
        psi.cnot(party, n + party);
    }
    if step == Step::P1 {
        // Acts on the control copy only, so it commutes with the target readout.
        for q in 0..n {
            psi.hadamard(q);
        }
    }
    let dim = 1usize << n;
    let amps = psi.amps();
    let mut gram: HashMap<(usize, usize), f64> = HashMap::new();
    let mut branch = vec![0.0; dim];
    for outcome in 0..dim {
        let kept = match step {
            Step::P1 => outcome.count_ones() % 2 == 0,
            Step::P2 => outcome == 0 || outcome == dim - 1,
        };
        if !kept {
            continue;
        }
        for (c, slot) in branch.iter_mut().enumerate() {
            *slot = amps[(c << n) | outcome];
        }
        let coeffs: Vec<(usize, f64)> = labels
            .iter()
            .map(|&l| (l.index(), ghz_overlap(l, &branch)))
            .filter(|&(_, g)| g.abs() > AMPLITUDE_CUTOFF)
            .collect();
        for (i, &(l, gl)) in coeffs.iter().enumerate() {
            for &(m, gm) in &coeffs[i..] {
                *gram.entry((l, m)).or_insert(0.0) += gl * gm;
            }
        }
    }
    let mut out: Vec<_> = gram.into_iter().collect();
    out.sort_by_key(|&(key, _)| key);
    out
}

impl TensorBuild {
    /// Largest off-diagonal residue of the averaged kept state over
    /// `samples` random GHZ-diagonal mixtures.
    pub fn self_test(&self, samples: usize, seed: u64) -> f64 {
        let n = self.tensor.n_parties;
        let dim = 1usize << n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let raw: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let keep: f64 = self
                .tensor
                .entries
                .iter()
                .map(|e| e.weight * w[e.control as usize] * w[e.target as usize])
                .sum();
            let mut off: HashMap<(u32, u32), f64> = HashMap::new();
            for c in &self.coherences {
                *off.entry((c.row, c.col)).or_insert(0.0) +=
                    c.value * w[c.control as usize] * w[c.target as usize];
            }
            let residue = off.values().map(|v| (v / keep).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(residue);
        }
        worst
    }
}

/// P1 evaluator for one party count.
#[derive(Debug, Clone)]
pub enum P1Engine {
    /// Precomputed quadratic map, trusted after the self-test.
    Tensor(TransitionTensor),
    /// Literal dense simulation of every step.
    Dense { n_parties: usize },
}

impl P1Engine {
    /// Builds the tensor when possible and keeps it only if the self-test
    /// passes; otherwise falls back to dense simulation.
    pub fn build(n_parties: usize) -> Result<Self> {
        check_parties(n_parties)?;
        if n_parties <= MAX_TENSOR_PARTIES {
            let build = TransitionTensor::build(n_parties, Step::P1)?;
            if build.self_test(SELF_TEST_SAMPLES, SELF_TEST_SEED) < SELF_TEST_TOLERANCE {
                return Ok(P1Engine::Tensor(build.tensor));
            }
        }
        if n_parties <= MAX_DENSE_PARTIES {
            Ok(P1Engine::Dense { n_parties })
        } else {
            Err(Error::TooLarge {
                n: n_parties,
                limit: MAX_DENSE_PARTIES,
            })
        }
    }

    pub fn is_fast(&self) -> bool {
        matches!(self, P1Engine::Tensor(_))
    }

    pub fn n_parties(&self) -> usize {
        match self {
            P1Engine::Tensor(t) => t.n_parties,
            P1Engine::Dense { n_parties } => *n_parties,
        }
    }

    pub fn apply(&self, state: &DiagonalState) -> Result<(DiagonalState, f64)> {
        match self {
            P1Engine::Tensor(t) => t.apply(state),
            P1Engine::Dense { n_parties } => {
                if state.n_parties() != *n_parties {
                    return Err(Error::MismatchedParties(state.n_parties(), *n_parties));
                }
                let out = run_protocol_step_dense(state, Step::P1)?;
                Ok((out.state, out.keep_prob))
            }
        }
    }
}

type EngineCell = Arc<OnceLock<Result<Arc<P1Engine>>>>;

/// Shared, lazily built P1 engine for `n_parties`.
pub fn p1_engine(n_parties: usize) -> Result<Arc<P1Engine>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, EngineCell>>> = OnceLock::new();
    let cell = {
        let mut cache = CACHE
            .get_or_init(|| Mutex::new(HashMap::new()))
            .lock()
            .expect("engine cache poisoned");
        cache.entry(n_parties).or_default().clone()
    };
    cell.get_or_init(|| P1Engine::build(n_parties).map(Arc::new))
        .clone()
}
