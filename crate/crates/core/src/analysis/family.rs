use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ghz::DiagonalState;

/// Jitter used when a perturbed family is requested by name only.
pub const DEFAULT_JITTER: f64 = 0.05;

/// One-parameter families of GHZ-diagonal states indexed by fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum StateFamily {
    Werner,
    BinaryMixture,
    ZeroPairing,
    /// Werner weights with seeded multiplicative noise off the target.
    PerturbedWerner {
        jitter: f64,
        seed: u64,
    },
}

impl StateFamily {
    /// The member of fidelity `f` for `n_parties`.
    pub fn state(&self, n_parties: usize, f: f64) -> Result<DiagonalState> {
        match *self {
            StateFamily::Werner => DiagonalState::werner_with_fidelity(n_parties, f),
            StateFamily::BinaryMixture => DiagonalState::binary_mixture(n_parties, f),
            StateFamily::ZeroPairing => DiagonalState::zero_pairing(n_parties, f),
            StateFamily::PerturbedWerner { jitter, seed } => {
                make_perturbed_werner(n_parties, f, jitter, seed)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StateFamily::Werner => "werner",
            StateFamily::BinaryMixture => "binary",
            StateFamily::ZeroPairing => "zero-pairing",
            StateFamily::PerturbedWerner { .. } => "perturbed-werner",
        }
    }

    /// Smallest fidelity the family is defined for.
    pub fn min_fidelity(&self, n_parties: usize) -> f64 {
        match self {
            StateFamily::Werner | StateFamily::PerturbedWerner { .. } => {
                1.0 / (1u64 << n_parties) as f64
            }
            StateFamily::BinaryMixture | StateFamily::ZeroPairing => 0.0,
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateFamily::PerturbedWerner { jitter, seed } => {
                write!(f, "{}(jitter={jitter},seed={seed})", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    /// Accepts `werner`, `binary`, `zero-pairing` and `perturbed-werner`;
    /// the perturbed family gets [`DEFAULT_JITTER`] and seed 0.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "werner" => Ok(Self::Werner),
            "binary" | "binary-mixture" => Ok(Self::BinaryMixture),
            "zero-pairing" => Ok(Self::ZeroPairing),
            "perturbed-werner" => Ok(Self::PerturbedWerner {
                jitter: DEFAULT_JITTER,
                seed: 0,
            }),
            other => Err(Error::Unknown {
                kind: "state family",
                value: other.to_string(),
            }),
        }
    }
}

/// Werner-type state of fidelity `f` whose other weights are each scaled
/// by `1 + u`, `u ~ U[−jitter, jitter]`, then rescaled to sum to `1 − f`.
pub fn make_perturbed_werner(
    n_parties: usize,
    f: f64,
    jitter: f64,
    seed: u64,
) -> Result<DiagonalState> {
    if !(0.0..1.0).contains(&jitter) {
        return Err(Error::OutOfRange {
            name: "jitter",
            value: jitter,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let base = DiagonalState::werner_with_fidelity(n_parties, f)?;
    if jitter == 0.0 {
        return Ok(base);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = base.into_weights();
    for w in weights[1..].iter_mut() {
        *w *= 1.0 + rng.gen_range(-jitter..=jitter);
    }
    let rest: f64 = weights[1..].iter().sum();
    if rest > 0.0 {
        let scale = (1.0 - f) / rest;
        weights[1..].iter_mut().for_each(|w| *w *= scale);
    }
    DiagonalState::new(n_parties, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn families_hit_their_fidelity() {
        let families = [
            StateFamily::Werner,
            StateFamily::BinaryMixture,
            StateFamily::ZeroPairing,
            StateFamily::PerturbedWerner {
                jitter: 0.05,
                seed: 3,
            },
        ];
        for family in families {
            for n in 2..=6 {
                for f in [0.4, 0.55, 0.8, 1.0] {
                    let s = family.state(n, f).unwrap();
                    assert_abs_diff_eq!(s.fidelity(), f, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn perturbation_contract() {
        let werner = DiagonalState::werner_with_fidelity(3, 0.6).unwrap();
        assert_eq!(make_perturbed_werner(3, 0.6, 0.0, 9).unwrap(), werner);
        let p = make_perturbed_werner(3, 0.6, 0.05, 1).unwrap();
        assert_eq!(p.fidelity(), 0.6);
        // Renormalization moves each factor by at most (1+j)/(1−j).
        let bound = 1.05 / 0.95 - 1.0;
        for (a, b) in p.weights()[1..].iter().zip(&werner.weights()[1..]) {
            assert!((a / b - 1.0).abs() <= bound);
        }
        assert_ne!(p, werner);
        assert_eq!(p, make_perturbed_werner(3, 0.6, 0.05, 1).unwrap());
        assert!(make_perturbed_werner(3, 0.6, 1.0, 1).is_err());
    }

    #[test]
    fn parse_names() {
        for family in [
            StateFamily::Werner,
            StateFamily::BinaryMixture,
            StateFamily::ZeroPairing,
        ] {
            assert_eq!(family.name().parse::<StateFamily>().unwrap(), family);
        }
        assert!(matches!(
            "perturbed-werner".parse::<StateFamily>(),
            Ok(StateFamily::PerturbedWerner { .. })
        ));
        assert!("gaussian".parse::<StateFamily>().is_err());
    }
}
