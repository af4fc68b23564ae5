use crate::error::{check_unit_interval, Result};
use crate::ghz::{pauli_act, DiagonalState, GhzLabel, Pauli, PauliString};

/// Each particle is untouched with probability `x` and the whole state is
/// replaced by the maximally mixed state otherwise; yields the Werner-type
/// state `x|φ+⟩⟨φ+| + (1−x)/2^N`.
pub fn channel_global_depolarize(n_parties: usize, x: f64) -> Result<DiagonalState> {
    DiagonalState::werner(n_parties, x)
}

/// `|φ+⟩` after independent depolarizing noise of strength `p` on every
/// particle: identity with probability `1 − 3p/4`, each of X, Y, Z with `p/4`.
pub fn channel_local_pauli(n_parties: usize, p: f64) -> Result<DiagonalState> {
    check_unit_interval("p", p)?;
    let mut weights = DiagonalState::phi_plus(n_parties)?.into_weights();
    for party in 1..=n_parties {
        let mut next: Vec<f64> = weights.iter().map(|w| w * (1.0 - 0.75 * p)).collect();
        for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
            let string = PauliString::single(n_parties, party, pauli);
            for label in GhzLabel::all(n_parties)? {
                let image = pauli_act(label, &string)?;
                next[image.index()] += 0.25 * p * weights[label.index()];
            }
        }
        weights = next;
    }
    DiagonalState::normalized(n_parties, weights)
}
