use std::f64::consts::FRAC_1_SQRT_2;

use super::operator::DensityOperator;
use crate::error::{Error, Result};
use crate::ghz::{check_parties, DiagonalState, GhzLabel};

/// Computational amplitudes of `|Ψ_label⟩`.
pub fn ghz_basis_vector(label: GhzLabel) -> Vec<f64> {
    let mut v = vec![0.0; 1 << label.n_parties()];
    let (lo, hi) = label.support();
    v[lo] = FRAC_1_SQRT_2;
    v[hi] = if label.s() == 0 {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    };
    v
}

/// `⟨Ψ_label|v⟩` for a real amplitude vector.
pub(crate) fn ghz_overlap(label: GhzLabel, amplitudes: &[f64]) -> f64 {
    let (lo, hi) = label.support();
    let sign = if label.s() == 0 { 1.0 } else { -1.0 };
    FRAC_1_SQRT_2 * (amplitudes[lo] + sign * amplitudes[hi])
}

/// `Σ_l w_l |Ψ_l⟩⟨Ψ_l|` in the computational basis.
pub fn embed_diagonal(state: &DiagonalState) -> DensityOperator {
    let n = state.n_parties();
    let dim = 1usize << n;
    let mut data = vec![0.0; dim * dim];
    for (index, &w) in state.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let label = GhzLabel::from_index_unchecked(n, index);
        let (lo, hi) = label.support();
        let half = 0.5 * w;
        let signed = if label.s() == 0 { half } else { -half };
        data[lo * dim + lo] += half;
        data[hi * dim + hi] += half;
        data[lo * dim + hi] += signed;
        data[hi * dim + lo] += signed;
    }
    DensityOperator::new(n, data).expect("dimension matches")
}

/// `ρ` expressed in the GHZ basis, row-major, label index order.
pub fn ghz_matrix(rho: &DensityOperator) -> Result<Vec<f64>> {
    let n = rho.n_qubits();
    check_parties(n)?;
    let dim = rho.dim();
    let legs: Vec<[(usize, f64); 2]> = (0..dim)
        .map(|index| {
            let label = GhzLabel::from_index_unchecked(n, index);
            let (lo, hi) = label.support();
            let sign = if label.s() == 0 { 1.0 } else { -1.0 };
            [(lo, FRAC_1_SQRT_2), (hi, sign * FRAC_1_SQRT_2)]
        })
        .collect();
    let mut out = vec![0.0; dim * dim];
    for (l, row_legs) in legs.iter().enumerate() {
        for (m, col_legs) in legs.iter().enumerate() {
            let mut acc = 0.0;
            for &(a, ca) in row_legs {
                for &(b, cb) in col_legs {
                    acc += ca * cb * rho.get(a, b);
                }
            }
            out[l * dim + m] = acc;
        }
    }
    Ok(out)
}

/// GHZ-diagonal part of `ρ` and the size of what was dropped.
///
/// The residue is the Frobenius norm of the strict upper triangle of `ρ` in
/// the GHZ basis, i.e. every coherence `⟨Ψ_l|ρ|Ψ_m⟩`, `l < m`, counted once.
/// Weights are renormalized to absorb rounding in the trace.
pub fn ghz_decompose(rho: &DensityOperator) -> Result<(DiagonalState, f64)> {
    let n = rho.n_qubits();
    let matrix = ghz_matrix(rho)?;
    let dim = rho.dim();
    let mut weights = Vec::with_capacity(dim);
    let mut residue_sq = 0.0;
    for l in 0..dim {
        let w = matrix[l * dim + l];
        if w < -1e-10 {
            return Err(Error::InvalidWeights(format!(
                "GHZ weight {w} is negative; operator is not physical"
            )));
        }
        weights.push(w.max(0.0));
        for m in l + 1..dim {
            residue_sq += matrix[l * dim + m].powi(2);
        }
    }
    Ok((DiagonalState::normalized(n, weights)?, residue_sq.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz::mcnot_labels;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_is_orthonormal() {
        for n in 2..=4 {
            let vs: Vec<Vec<f64>> = GhzLabel::all(n).unwrap().map(ghz_basis_vector).collect();
            for (i, a) in vs.iter().enumerate() {
                for (j, b) in vs.iter().enumerate() {
                    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                    assert_abs_diff_eq!(dot, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn embed_examples() {
        let rho = embed_diagonal(&DiagonalState::phi_plus(2).unwrap());
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(rho.get(i, j), 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-15);

        let rho = embed_diagonal(&DiagonalState::werner(2, 0.0).unwrap());
        assert!(rho.max_abs_diff(&DensityOperator::maximally_mixed(2)) < 1e-15);

        let rho = embed_diagonal(&DiagonalState::werner(3, 0.5).unwrap());
        let phi = ghz_basis_vector(GhzLabel::phi_plus(3).unwrap());
        let f: f64 = (0..8)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .map(|(i, j)| phi[i] * rho.get(i, j) * phi[j])
            .sum();
        assert_abs_diff_eq!(f, 0.5625, epsilon = 1e-15);
    }

    #[test]
    fn decompose_examples() {
        let mut zero = vec![0.0; 8];
        zero[0] = 1.0;
        let (s, residue) = ghz_decompose(&DensityOperator::from_pure(&zero).unwrap()).unwrap();
        assert_abs_diff_eq!(s.fidelity(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.pairing_weight(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(residue, 0.5, epsilon = 1e-15);

        let ghz = ghz_basis_vector(GhzLabel::phi_plus(3).unwrap());
        let (s, residue) = ghz_decompose(&DensityOperator::from_pure(&ghz).unwrap()).unwrap();
        assert_abs_diff_eq!(s.fidelity(), 1.0, epsilon = 1e-15);
        assert!(residue < 1e-15);
    }

    #[test]
    fn embed_decompose_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            for _ in 0..20 {
                let w: Vec<f64> = (0..1 << n).map(|_| rng.gen::<f64>()).collect();
                let s = DiagonalState::normalized(n, w).unwrap();
                let (back, residue) = ghz_decompose(&embed_diagonal(&s)).unwrap();
                assert!(back.max_abs_diff(&s) < 1e-12);
                assert!(residue < 1e-12);
            }
        }
    }

    /// Exhaustive check of the multilateral CNOT label rule against the
    /// gate-level simulation on pure products.
    #[test]
    fn mcnot_label_rule_matches_dense_gates() {
        for n in 2..=4 {
            let labels: Vec<GhzLabel> = GhzLabel::all(n).unwrap().collect();
            for &a in &labels {
                for &b in &labels {
                    let mut rho = DensityOperator::from_pure(&ghz_basis_vector(a))
                        .unwrap()
                        .kron(&DensityOperator::from_pure(&ghz_basis_vector(b)).unwrap());
                    for party in 0..n {
                        rho.cnot_mut(party, n + party).unwrap();
                    }
                    let (ea, eb) = mcnot_labels(a, b).unwrap();
                    let expected = DensityOperator::from_pure(&ghz_basis_vector(ea))
                        .unwrap()
                        .kron(&DensityOperator::from_pure(&ghz_basis_vector(eb)).unwrap());
                    assert!(rho.max_abs_diff(&expected) < 1e-14, "{a} {b}");
                }
            }
        }
    }

    /// Pauli label action against gate-level X/Z/Y conjugation.
    #[test]
    fn pauli_label_rule_matches_dense_gates() {
        use crate::ghz::{pauli_act, Pauli, PauliString};
        for n in 2..=3 {
            for l in GhzLabel::all(n).unwrap() {
                let rho = DensityOperator::from_pure(&ghz_basis_vector(l)).unwrap();
                for party in 1..=n {
                    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                        let q = party - 1;
                        let out = match p {
                            Pauli::X => rho.apply_x(q),
                            Pauli::Z => rho.apply_z(q),
                            Pauli::Y => rho.conjugate_y(q),
                            Pauli::I => unreachable!(),
                        }
                        .unwrap();
                        let image = pauli_act(l, &PauliString::single(n, party, p)).unwrap();
                        let expected =
                            DensityOperator::from_pure(&ghz_basis_vector(image)).unwrap();
                        assert!(out.max_abs_diff(&expected) < 1e-14);
                    }
                }
            }
        }
    }
}
