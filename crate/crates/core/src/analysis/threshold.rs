use serde::Serialize;

use super::StateFamily;
use crate::error::{Error, Result};
use crate::ghz::check_parties;
use crate::indirect::{indirect_pipeline, IndirectConfig};
use crate::protocols::{iterate, Schedule};

/// Default width of the final bisection bracket.
pub const DEFAULT_BRACKET_TOLERANCE: f64 = 1e-4;

/// Upper probe; a family that does not converge here has no threshold.
const NEAR_PURE: f64 = 1.0 - 1e-9;

/// Lowest purifiable fidelity of a family, located by bisection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub n_parties: usize,
    pub family: String,
    pub schedule: String,
    /// Midpoint of the final bracket.
    pub threshold: f64,
    pub lower: f64,
    pub upper: f64,
    pub bracket_width: f64,
    /// Predicate evaluations spent, including the verification probes.
    pub evaluations: usize,
    /// `threshold + width` converges and `threshold − width` does not.
    pub verified: bool,
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "bracket_tolerance",
            value: tol,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// Bisection for the boundary of a predicate that is false below and true
/// above it on `[lo, 1]`.
fn bisect(
    n_parties: usize,
    family: &StateFamily,
    schedule: String,
    tol: f64,
    mut converges: impl FnMut(f64) -> Result<bool>,
) -> Result<ThresholdResult> {
    check_parties(n_parties)?;
    check_tolerance(tol)?;
    let floor = family.min_fidelity(n_parties);
    let mut evaluations = 1;
    if !converges(NEAR_PURE)? {
        return Err(Error::NoThreshold(format!(
            "{family} with N = {n_parties} does not converge under {schedule} even at f = {NEAR_PURE}"
        )));
    }
    let (mut lo, mut hi) = (floor, NEAR_PURE);
    evaluations += 1;
    if converges(floor)? {
        hi = floor;
    } else {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            evaluations += 1;
            if converges(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let width = hi - lo;
    let threshold = if width == 0.0 { hi } else { 0.5 * (lo + hi) };
    let above = (threshold + width).min(1.0);
    let below = threshold - width;
    let verified = converges(above)? && (below < floor || !converges(below)?);
    evaluations += 2;
    Ok(ThresholdResult {
        n_parties,
        family: family.to_string(),
        schedule,
        threshold,
        lower: lo,
        upper: hi,
        bracket_width: width,
        evaluations,
        verified,
    })
}

/// Threshold of `schedule` on `family`; `MaxIterations` counts as failure.
pub fn find_threshold(
    family: &StateFamily,
    n_parties: usize,
    schedule: &Schedule,
    bracket_tolerance: f64,
) -> Result<ThresholdResult> {
    bisect(
        n_parties,
        family,
        schedule.to_string(),
        bracket_tolerance,
        |f| Ok(iterate(&family.state(n_parties, f)?, schedule)?.converged()),
    )
}

/// Threshold of the indirect route on `family`.
pub fn find_indirect_threshold(
    family: &StateFamily,
    n_parties: usize,
    config: &IndirectConfig,
    bracket_tolerance: f64,
) -> Result<ThresholdResult> {
    bisect(
        n_parties,
        family,
        format!("indirect-{}", config.variant),
        bracket_tolerance,
        |f| Ok(indirect_pipeline(&family.state(n_parties, f)?, config)?.converged()),
    )
}
