use serde::Serialize;

use super::label::{check_parties, GhzLabel};
use crate::error::{check_unit_interval, Error, Result};

/// Tolerance on `Σ w = 1` for a valid diagonal state.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Mixed state diagonal in the GHZ basis: one probability per [`GhzLabel`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalState {
    n_parties: usize,
    weights: Vec<f64>,
}

impl DiagonalState {
    /// Validates nonnegativity (up to `-1e-12`, clamped) and normalization.
    pub fn new(n_parties: usize, weights: Vec<f64>) -> Result<Self> {
        check_parties(n_parties)?;
        if weights.len() != 1 << n_parties {
            return Err(Error::InvalidWeights(format!(
                "expected {} weights for N = {n_parties}, got {}",
                1usize << n_parties,
                weights.len()
            )));
        }
        let mut weights = weights;
        for w in weights.iter_mut() {
            if !w.is_finite() || *w < -NORMALIZATION_TOL {
                return Err(Error::InvalidWeights(format!("weight {w} is negative")));
            }
            *w = w.max(0.0);
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self { n_parties, weights })
    }

    /// Divides by the total; fails on an all-zero or non-finite vector.
    pub fn normalized(n_parties: usize, mut weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Self::new(n_parties, weights)
    }

    /// Internal constructor for map outputs that are normalized by construction.
    pub(crate) fn from_raw(n_parties: usize, weights: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), 1 << n_parties);
        Self { n_parties, weights }
    }

    /// Werner-type state `x|φ+⟩⟨φ+| + (1−x)·1/2^N`.
    pub fn werner(n_parties: usize, x: f64) -> Result<Self> {
        check_parties(n_parties)?;
        check_unit_interval("x", x)?;
        let dim = 1usize << n_parties;
        let background = (1.0 - x) / dim as f64;
        let mut weights = vec![background; dim];
        weights[0] = x + background;
        Ok(Self { n_parties, weights })
    }

    /// Werner-type state parameterized by its fidelity `f ∈ [2^−N, 1]`.
    pub fn werner_with_fidelity(n_parties: usize, f: f64) -> Result<Self> {
        check_parties(n_parties)?;
        let floor = 1.0 / (1u64 << n_parties) as f64;
        if !(floor..=1.0).contains(&f) {
            return Err(Error::OutOfRange {
                name: "f",
                value: f,
                lo: floor,
                hi: 1.0,
            });
        }
        // Fill the background directly so that weight (0,0) is exactly f.
        let dim = 1usize << n_parties;
        let mut weights = vec![(1.0 - f) / (dim - 1) as f64; dim];
        weights[0] = f;
        Ok(Self { n_parties, weights })
    }

    /// `f|φ+⟩⟨φ+| + (1−f)|φ−⟩⟨φ−|`.
    pub fn binary_mixture(n_parties: usize, f: f64) -> Result<Self> {
        check_parties(n_parties)?;
        check_unit_interval("f", f)?;
        let mut weights = vec![0.0; 1 << n_parties];
        weights[0] = f;
        weights[1] = 1.0 - f;
        Ok(Self { n_parties, weights })
    }

    /// Fidelity `f`, nothing on `|φ−⟩`, the rest spread evenly.
    pub fn zero_pairing(n_parties: usize, f: f64) -> Result<Self> {
        check_parties(n_parties)?;
        check_unit_interval("f", f)?;
        let dim = 1usize << n_parties;
        let mut weights = vec![(1.0 - f) / (dim - 2) as f64; dim];
        weights[0] = f;
        weights[1] = 0.0;
        Ok(Self { n_parties, weights })
    }

    pub fn phi_plus(n_parties: usize) -> Result<Self> {
        Self::binary_mixture(n_parties, 1.0)
    }

    pub fn maximally_mixed(n_parties: usize) -> Result<Self> {
        Self::werner(n_parties, 0.0)
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn weight(&self, label: GhzLabel) -> f64 {
        debug_assert_eq!(label.n_parties(), self.n_parties);
        self.weights[label.index()]
    }

    /// `⟨φ+|ρ|φ+⟩`.
    pub fn fidelity(&self) -> f64 {
        self.weights[0]
    }

    /// Weight on the pairing state `|φ−⟩`.
    pub fn pairing_weight(&self) -> f64 {
        self.weights[1]
    }

    /// Total weight of the `k = 0` sector (`|φ+⟩` and `|φ−⟩`).
    pub fn k0_weight(&self) -> f64 {
        self.weights[0] + self.weights[1]
    }

    pub fn max_abs_diff(&self, other: &DiagonalState) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Real-amplitude pure state `a|0⋯0⟩ + b|1⋯1⟩` with `b = √(1−a²)` and `a ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureCatState {
    n_parties: usize,
    a: f64,
    b: f64,
}

impl PureCatState {
    pub fn new(n_parties: usize, a: f64) -> Result<Self> {
        check_parties(n_parties)?;
        let hi = std::f64::consts::FRAC_1_SQRT_2;
        if !(0.0..=hi + 1e-12).contains(&a) {
            return Err(Error::OutOfRange {
                name: "a",
                value: a,
                lo: 0.0,
                hi,
            });
        }
        let a = a.min(hi);
        let b = (1.0 - a * a).sqrt();
        Ok(Self { n_parties, a, b })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `|⟨φ+|Φ⟩|² = (a+b)²/2`.
    pub fn fidelity(&self) -> f64 {
        (self.a + self.b).powi(2) / 2.0
    }

    /// Computational-basis amplitudes.
    pub fn amplitudes(&self) -> Vec<f64> {
        let dim = 1usize << self.n_parties;
        let mut v = vec![0.0; dim];
        v[0] = self.a;
        v[dim - 1] += self.b;
        v
    }
}

/// Two-particle Bell-diagonal state, weights in label order
/// `[φ+, φ−, ψ+, ψ−]` (indices `(k<<1)|s`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellDiagonalState {
    weights: [f64; 4],
}

impl BellDiagonalState {
    pub const PHI_PLUS: usize = 0;
    pub const PHI_MINUS: usize = 1;
    pub const PSI_PLUS: usize = 2;
    pub const PSI_MINUS: usize = 3;

    pub fn new(weights: [f64; 4]) -> Result<Self> {
        let state = DiagonalState::new(2, weights.to_vec())?;
        Ok(Self::from_raw(state.weights.try_into().expect("4 weights")))
    }

    pub(crate) fn from_raw(weights: [f64; 4]) -> Self {
        Self { weights }
    }

    /// Two-particle Werner state with the given fidelity.
    pub fn werner_with_fidelity(f: f64) -> Result<Self> {
        check_unit_interval("f", f)?;
        let q = (1.0 - f) / 3.0;
        Ok(Self {
            weights: [f, q, q, q],
        })
    }

    pub fn phi_plus() -> Self {
        Self {
            weights: [1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn maximally_mixed() -> Self {
        Self { weights: [0.25; 4] }
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    pub fn fidelity(&self) -> f64 {
        self.weights[Self::PHI_PLUS]
    }

    /// Werner state of equal fidelity (depolarizing twirl).
    pub fn twirled(&self) -> Self {
        let f = self.fidelity();
        let q = (1.0 - f) / 3.0;
        Self {
            weights: [f, q, q, q],
        }
    }

    pub fn to_diagonal(&self) -> DiagonalState {
        DiagonalState::from_raw(2, self.weights.to_vec())
    }

    pub fn from_diagonal(state: &DiagonalState) -> Result<Self> {
        if state.n_parties() != 2 {
            return Err(Error::MismatchedParties(state.n_parties(), 2));
        }
        Ok(Self::from_raw(
            state
                .weights()
                .try_into()
                .expect("two parties have 4 labels"),
        ))
    }
}
