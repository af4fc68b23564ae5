//! Literal gate-and-measurement versions of every protocol in the crate.

use super::basis::{embed_diagonal, ghz_decompose};
use super::operator::{DensityOperator, ZERO_PROBABILITY};
use crate::error::{Error, Result};
use crate::ghz::{check_parties, BellDiagonalState, DiagonalState};
use crate::protocols::Step;

/// Largest party count for which two copies are simulated densely.
pub const MAX_DENSE_PARTIES: usize = 7;

/// Output of one dense protocol step.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStep {
    pub state: DiagonalState,
    pub keep_prob: f64,
    /// Off-diagonal GHZ-basis residue of the averaged kept state.
    pub residue: f64,
}

fn keeps(step: Step, outcome: usize, n: usize) -> bool {
    match step {
        Step::P1 => outcome.count_ones() % 2 == 0,
        Step::P2 => outcome == 0 || outcome == (1 << n) - 1,
    }
}

/// One protocol step on an arbitrary `N`-qubit ensemble state.
///
/// Forms `ρ ⊗ ρ` (control copy on qubits `0..N`, target copy on `N..2N`),
/// runs the circuit, and returns the probability-weighted mixture of the
/// kept branches together with the total keep probability.
pub fn step_density(rho: &DensityOperator, step: Step) -> Result<(DensityOperator, f64)> {
    let n = rho.n_qubits();
    if n > MAX_DENSE_PARTIES {
        return Err(Error::TooLarge {
            n,
            limit: MAX_DENSE_PARTIES,
        });
    }
    let mut pair = rho.kron(rho);
    if step == Step::P1 {
        for q in 0..2 * n {
            pair.hadamard_mut(q)?;
        }
    }
    for party in 0..n {
        pair.cnot_mut(party, n + party)?;
    }
    let targets: Vec<usize> = (n..2 * n).collect();
    let mut kept = DensityOperator::zeros(n);
    let mut keep_prob = 0.0;
    for record in pair.measure_and_discard(&targets)? {
        if keeps(step, record.outcome_bits(), n) {
            kept.add_scaled(&record.post_state, record.probability);
            keep_prob += record.probability;
        }
    }
    if keep_prob < ZERO_PROBABILITY {
        return Err(Error::Annihilated);
    }
    kept.scale(1.0 / keep_prob);
    if step == Step::P1 {
        for q in 0..n {
            kept.hadamard_mut(q)?;
        }
    }
    Ok((kept, keep_prob))
}

/// Reference execution of P1 or P2 on a GHZ-diagonal ensemble.
pub fn run_protocol_step_dense(state: &DiagonalState, step: Step) -> Result<DenseStep> {
    let (rho, keep_prob) = step_density(&embed_diagonal(state), step)?;
    let (state, residue) = ghz_decompose(&rho)?;
    Ok(DenseStep {
        state,
        keep_prob,
        residue,
    })
}

/// Applies `(1 − 3p/4)ρ + (p/4)(XρX + YρY + ZρZ)` on one qubit.
pub fn depolarize_qubit(rho: &DensityOperator, qubit: usize, p: f64) -> Result<DensityOperator> {
    crate::error::check_unit_interval("p", p)?;
    let mut out = rho.clone();
    out.scale(1.0 - 0.75 * p);
    out.add_scaled(&rho.apply_x(qubit)?, 0.25 * p);
    out.add_scaled(&rho.conjugate_y(qubit)?, 0.25 * p);
    out.add_scaled(&rho.apply_z(qubit)?, 0.25 * p);
    Ok(out)
}

/// Measures `qubit` in the `|χ±⟩ = (|0⟩ ± |1⟩)/√2` basis, applies σ_z to
/// qubit 0 on the `χ−` outcome, and discards the measured qubit.
fn chi_measure_qubit(rho: &DensityOperator, qubit: usize) -> Result<DensityOperator> {
    let rotated = rho.apply_hadamard(qubit)?;
    let mut out = DensityOperator::zeros(rho.n_qubits() - 1);
    for record in rotated.measure_and_discard(&[qubit])? {
        let mut post = record.post_state;
        if record.outcome[0] == 1 {
            post.z_mut(0)?;
        }
        out.add_scaled(&post, record.probability);
    }
    Ok(out)
}

/// Reduces an `N`-party state to the pair (party 1, `partner`) by χ±
/// measurements on every other party, with the σ_z correction on party 1.
pub fn chi_measure_reduce(state: &DiagonalState, partner: usize) -> Result<BellDiagonalState> {
    let n = state.n_parties();
    if n < 3 {
        return Err(Error::PartyCount {
            n,
            min: 3,
            max: crate::ghz::MAX_PARTIES,
        });
    }
    if !(2..=n).contains(&partner) {
        return Err(Error::QubitIndex {
            index: partner,
            n_qubits: n,
        });
    }
    let mut rho = embed_diagonal(state);
    // Parties still present, in qubit order; measure from the back so that
    // earlier qubit indices stay valid.
    let mut present: Vec<usize> = (1..=n).collect();
    for party in (2..=n).rev().filter(|&p| p != partner) {
        let qubit = present.iter().position(|&p| p == party).expect("present");
        rho = chi_measure_qubit(&rho, qubit)?;
        present.remove(qubit);
    }
    let (pair, _) = ghz_decompose(&rho)?;
    BellDiagonalState::from_diagonal(&pair)
}

/// Joins a Bell pair held by party 1 and a new party onto an `M`-party
/// GHZ-diagonal state: party 1 applies CNOT from its GHZ qubit to its pair
/// qubit, measures the pair qubit, and the new party applies X on outcome 1.
pub fn extend_ghz(ghz: &DiagonalState, pair: &BellDiagonalState) -> Result<DiagonalState> {
    let m = ghz.n_parties();
    check_parties(m + 1)?;
    if m + 2 > 2 * MAX_DENSE_PARTIES {
        return Err(Error::TooLarge {
            n: m + 1,
            limit: 2 * MAX_DENSE_PARTIES - 1,
        });
    }
    let mut rho = embed_diagonal(ghz).kron(&embed_diagonal(&pair.to_diagonal()));
    rho.cnot_mut(0, m)?;
    let mut out = DensityOperator::zeros(m + 1);
    for record in rho.measure_and_discard(&[m])? {
        let mut post = record.post_state;
        if record.outcome[0] == 1 {
            post.x_mut(m)?;
        }
        out.add_scaled(&post, record.probability);
    }
    Ok(ghz_decompose(&out)?.0)
}

/// Three-party GHZ-diagonal state from pairs (A,B) and (A,C).
pub fn recombine_ghz(pair_ab: &BellDiagonalState, pair_ac: &BellDiagonalState) -> DiagonalState {
    extend_ghz(&pair_ab.to_diagonal(), pair_ac).expect("three parties are always in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn p1_on_binary_mixture_follows_recursion() {
        let out =
            run_protocol_step_dense(&DiagonalState::binary_mixture(2, 0.75).unwrap(), Step::P1)
                .unwrap();
        assert_abs_diff_eq!(out.state.fidelity(), 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(out.keep_prob, 0.625, epsilon = 1e-12);
        assert!(out.residue < 1e-10);

        for i in 1..=9 {
            let f = i as f64 / 10.0;
            let out =
                run_protocol_step_dense(&DiagonalState::binary_mixture(2, f).unwrap(), Step::P1)
                    .unwrap();
            let expected = f * f / (2.0 * f * f - 2.0 * f + 1.0);
            assert_abs_diff_eq!(out.state.fidelity(), expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn phi_plus_is_fixed_by_p1() {
        for n in 2..=4 {
            let out =
                run_protocol_step_dense(&DiagonalState::phi_plus(n).unwrap(), Step::P1).unwrap();
            assert_abs_diff_eq!(out.state.fidelity(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(out.keep_prob, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn p2_on_zero_pairing_state() {
        let out = run_protocol_step_dense(&DiagonalState::zero_pairing(3, 0.5).unwrap(), Step::P2)
            .unwrap();
        assert_abs_diff_eq!(out.state.fidelity(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(out.keep_prob, 1.0 / 3.0, epsilon = 1e-12);
        assert!(out.residue < 1e-10);
    }

    /// Mid-P2 on a binary mixture only `000` and `111` appear on the targets.
    #[test]
    fn p2_target_outcomes_on_binary_mixture() {
        let rho = embed_diagonal(&DiagonalState::binary_mixture(3, 0.7).unwrap());
        let mut pair = rho.kron(&rho);
        for p in 0..3 {
            pair.cnot_mut(p, 3 + p).unwrap();
        }
        let outcomes: Vec<usize> = pair
            .measure_and_discard(&[3, 4, 5])
            .unwrap()
            .iter()
            .map(|r| r.outcome_bits())
            .collect();
        assert_eq!(outcomes, vec![0b000, 0b111]);
    }

    #[test]
    fn gates_and_steps_keep_states_physical() {
        let rho = embed_diagonal(&DiagonalState::werner(3, 0.4).unwrap());
        for step in [Step::P1, Step::P2] {
            let (out, p) = step_density(&rho, step).unwrap();
            assert!(out.is_physical(1e-10));
            assert!((0.0..=1.0).contains(&p));
        }
        let noisy = depolarize_qubit(&rho, 1, 0.3).unwrap();
        assert!(noisy.is_physical(1e-10));
    }

    #[test]
    fn dense_size_guard() {
        let big = DensityOperator::maximally_mixed(8);
        assert!(matches!(
            step_density(&big, Step::P2),
            Err(Error::TooLarge { n: 8, .. })
        ));
    }

    #[test]
    fn chi_reduction_of_werner_states() {
        for x in [0.0, 0.3, 0.8, 1.0] {
            let pair = chi_measure_reduce(&DiagonalState::werner(3, x).unwrap(), 2).unwrap();
            let w = pair.weights();
            assert_abs_diff_eq!(w[0], x + (1.0 - x) / 4.0, epsilon = 1e-12);
            for &v in &w[1..] {
                assert_abs_diff_eq!(v, (1.0 - x) / 4.0, epsilon = 1e-12);
            }
        }
        let pair = chi_measure_reduce(
            &DiagonalState::werner_with_fidelity(4, 3.0 / 8.0).unwrap(),
            3,
        )
        .unwrap();
        assert_abs_diff_eq!(pair.fidelity(), 0.5, epsilon = 1e-12);
        assert!(chi_measure_reduce(&DiagonalState::phi_plus(2).unwrap(), 2).is_err());
        assert!(chi_measure_reduce(&DiagonalState::phi_plus(3).unwrap(), 4).is_err());
    }

    #[test]
    fn chi_reduction_marginalizes_other_k_bits() {
        // (k=01, s=1) on three parties: party 2 bit is 0, party 3 bit is 1.
        let mut w = vec![0.0; 8];
        w[0b011] = 1.0;
        let s = DiagonalState::new(3, w).unwrap();
        let keep2 = chi_measure_reduce(&s, 2).unwrap();
        assert_abs_diff_eq!(
            keep2.weights()[BellDiagonalState::PHI_MINUS],
            1.0,
            epsilon = 1e-12
        );
        let keep3 = chi_measure_reduce(&s, 3).unwrap();
        assert_abs_diff_eq!(
            keep3.weights()[BellDiagonalState::PSI_MINUS],
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn recombination_examples() {
        let perfect = BellDiagonalState::phi_plus();
        assert_abs_diff_eq!(
            recombine_ghz(&perfect, &perfect).fidelity(),
            1.0,
            epsilon = 1e-12
        );

        let noisy = BellDiagonalState::werner_with_fidelity(0.7).unwrap();
        assert_abs_diff_eq!(
            recombine_ghz(&perfect, &noisy).fidelity(),
            0.7,
            epsilon = 1e-12
        );

        let mixed = BellDiagonalState::maximally_mixed();
        let out = recombine_ghz(&mixed, &mixed);
        assert!(out.max_abs_diff(&DiagonalState::werner(3, 0.0).unwrap()) < 1e-12);
    }

    #[test]
    fn recombination_label_rule() {
        // (k1,s1) ⊗ (k2,s2) → (k1 k2, s1⊕s2)
        for a in 0..4 {
            for b in 0..4 {
                let mut wa = [0.0; 4];
                wa[a] = 1.0;
                let mut wb = [0.0; 4];
                wb[b] = 1.0;
                let out = recombine_ghz(
                    &BellDiagonalState::new(wa).unwrap(),
                    &BellDiagonalState::new(wb).unwrap(),
                );
                let k = ((a >> 1) << 1) | (b >> 1);
                let s = (a ^ b) & 1;
                assert_abs_diff_eq!(out.weights()[(k << 1) | s], 1.0, epsilon = 1e-12);
            }
        }
    }
}
