use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// One recurrence step, consuming two identical copies of the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Step {
    /// Hadamards, party-wise CNOT, keep on even target parity, Hadamards.
    P1,
    /// Party-wise CNOT, keep when all target bits agree.
    P2,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Step::P1 => "p1",
            Step::P2 => "p2",
        })
    }
}

pub const DEFAULT_ACCURACY: f64 = 1e-7;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// Cyclic step sequence plus stopping rules.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    steps: Vec<Step>,
    accuracy: f64,
    max_iterations: usize,
}

impl Schedule {
    pub fn new(steps: Vec<Step>, accuracy: f64, max_iterations: usize) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidSchedule("empty step cycle".into()));
        }
        if !(accuracy > 0.0 && accuracy < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "accuracy {accuracy} is not in (0, 1)"
            )));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidSchedule("max_iterations must be >= 1".into()));
        }
        Ok(Self {
            steps,
            accuracy,
            max_iterations,
        })
    }

    /// P1, P2, P1, P2, ...
    pub fn alternating() -> Self {
        Self::preset(vec![Step::P1, Step::P2])
    }

    pub fn p1_only() -> Self {
        Self::preset(vec![Step::P1])
    }

    pub fn p2_only() -> Self {
        Self::preset(vec![Step::P2])
    }

    fn preset(steps: Vec<Step>) -> Self {
        Self {
            steps,
            accuracy: DEFAULT_ACCURACY,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_accuracy(mut self, accuracy: f64) -> Result<Self> {
        self = Self::new(self.steps, accuracy, self.max_iterations)?;
        Ok(self)
    }

    pub fn with_max_iterations(self, max_iterations: usize) -> Result<Self> {
        Self::new(self.steps, self.accuracy, max_iterations)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    /// Step executed at 0-based iteration `j`.
    pub fn step_at(&self, j: usize) -> Step {
        self.steps[j % self.steps.len()]
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self::alternating()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.steps.as_slice() {
            [Step::P1] => f.write_str("p1"),
            [Step::P2] => f.write_str("p2"),
            [Step::P1, Step::P2] => f.write_str("p1p2"),
            steps => {
                let parts: Vec<String> = steps.iter().map(Step::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// Parses `p1`, `p2`, `p1p2` or an explicit cycle such as `p1,p1,p2`.
/// Accuracy and iteration cap take their defaults.
impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let steps = match lower.as_str() {
            "p1p2" => vec![Step::P1, Step::P2],
            _ => lower
                .split(',')
                .map(|part| match part.trim() {
                    "p1" => Ok(Step::P1),
                    "p2" => Ok(Step::P2),
                    other => Err(Error::InvalidSchedule(format!(
                        "unknown step {other:?} in {s:?}"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Self::new(steps, DEFAULT_ACCURACY, DEFAULT_MAX_ITERATIONS)
    }
}
