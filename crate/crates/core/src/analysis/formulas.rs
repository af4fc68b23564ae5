use crate::dense::chi_measure_reduce;
use crate::error::Result;
use crate::ghz::DiagonalState;

/// Fidelity of the pair (1, 2) left after the χ± measurements on a
/// Werner-type state of fidelity `f`.
///
/// Closed forms are used for `N = 3..6`; any other `N` is computed by the
/// dense reduction.
pub fn reduced_fidelity_formula(n_parties: usize, f: f64) -> Result<f64> {
    Ok(match n_parties {
        3 => (1.0 + 6.0 * f) / 7.0,
        4 => (1.0 + 4.0 * f) / 5.0,
        5 => (7.0 + 24.0 * f) / 31.0,
        6 => (5.0 + 16.0 * f) / 21.0,
        n => chi_measure_reduce(&DiagonalState::werner_with_fidelity(n, f)?, 2)?.fidelity(),
    })
}
