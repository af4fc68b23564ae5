use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::StateFamily;
use crate::error::{Error, Result};
use crate::indirect::{indirect_pipeline, IndirectConfig, IndirectTrace, TwoParticleProtocol};
use crate::protocols::{iterate, PurificationTrace, Schedule};

/// How a converged run is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
pub enum EfficiencyMeasure {
    /// `P_J`: fraction of control copies that survive every round
    /// (divided by `N − 1` for the indirect route).
    #[default]
    Survival,
    /// `P_J / 2^J`: final states per initial state, counting the discarded
    /// target copies (divided by `N − 1` for the indirect route).
    Halved,
}

impl fmt::Display for EfficiencyMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EfficiencyMeasure::Survival => "survival",
            EfficiencyMeasure::Halved => "halved",
        })
    }
}

impl FromStr for EfficiencyMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "survival" => Ok(Self::Survival),
            "halved" => Ok(Self::Halved),
            other => Err(Error::Unknown {
                kind: "efficiency measure",
                value: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectPoint {
    pub converged: bool,
    pub iterations: usize,
    pub survival: f64,
}

impl DirectPoint {
    fn from_trace(trace: &PurificationTrace) -> Self {
        Self {
            converged: trace.converged(),
            iterations: trace.iterations(),
            survival: trace.survival(),
        }
    }

    pub fn efficiency(&self, measure: EfficiencyMeasure) -> Option<f64> {
        self.converged.then(|| match measure {
            EfficiencyMeasure::Survival => self.survival,
            EfficiencyMeasure::Halved => self.survival * 0.5f64.powi(self.iterations as i32),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndirectPoint {
    pub converged: bool,
    /// Largest pair iteration count.
    pub iterations: usize,
    pub normalized_survival: Option<f64>,
    pub normalized_efficiency: Option<f64>,
}

impl IndirectPoint {
    fn from_trace(trace: &IndirectTrace) -> Self {
        Self {
            converged: trace.converged(),
            iterations: trace.iterations(),
            normalized_survival: trace.normalized_survival,
            normalized_efficiency: trace.normalized_efficiency,
        }
    }

    pub fn efficiency(&self, measure: EfficiencyMeasure) -> Option<f64> {
        match measure {
            EfficiencyMeasure::Survival => self.normalized_survival,
            EfficiencyMeasure::Halved => self.normalized_efficiency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub f: f64,
    pub direct: DirectPoint,
    pub indirect: IndirectPoint,
}

/// Runs the direct schedule and the indirect route on every grid point.
///
/// Both use the schedule's accuracy and iteration cap. Points that do not
/// converge are reported as such; rows keep grid order.
pub fn efficiency_sweep(
    n_parties: usize,
    family: &StateFamily,
    grid: &[f64],
    schedule: &Schedule,
    variant: TwoParticleProtocol,
) -> Result<Vec<SweepRow>> {
    let config = IndirectConfig {
        accuracy: schedule.accuracy(),
        max_iterations: schedule.max_iterations(),
        variant,
    };
    grid.par_iter()
        .map(|&f| {
            let state = family.state(n_parties, f)?;
            Ok(SweepRow {
                f,
                direct: DirectPoint::from_trace(&iterate(&state, schedule)?),
                indirect: IndirectPoint::from_trace(&indirect_pipeline(&state, &config)?),
            })
        })
        .collect()
}

/// Parses `lo:hi:step` into an inclusive grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("{text:?} is not lo:hi:step")))
        })
        .collect::<Result<_>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err(Error::InvalidGrid(format!("{text:?} is not lo:hi:step")));
    };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(Error::InvalidGrid(format!(
            "{text:?} needs finite lo <= hi and step > 0"
        )));
    }
    // Snap to the grid so that `hi` is included despite rounding.
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    if count > 1_000_000 {
        return Err(Error::InvalidGrid(format!("{text:?} has too many points")));
    }
    Ok((0..=count)
        .map(|i| {
            let v = lo + step * i as f64;
            (v * 1e12).round() / 1e12
        })
        .collect())
}

/// 0.40 to 1.00 in steps of 0.05.
pub fn default_grid() -> Vec<f64> {
    parse_grid("0.40:1.00:0.05").expect("static grid")
}
