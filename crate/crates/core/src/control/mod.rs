//! The planning problem: choose per-period savings and emissions-reduction
//! rates to maximise discounted utility.

mod scc;
mod simulate;
mod solver;
mod sweep;

pub use scc::{social_cost_of_carbon, social_cost_of_carbon_adjoint, SccError};
pub use simulate::{evaluate_objective, evaluate_objective_for, simulate, utility, ObjectiveValue};
pub use solver::{solve, solve_model, SolverSettings};
pub use sweep::{sensitivity_sweep, summarize, SweepRow, SweepSummary};

use std::fmt;
use std::str::FromStr;

use crate::economy::{Model, PeriodRecord};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct ControlPath {
    pub s: Vec<f64>,
    pub mu: Vec<f64>,
}

impl ControlPath {
    pub fn constant(periods: usize, s: f64, mu: f64) -> Self {
        ControlPath {
            s: vec![s; periods],
            mu: vec![mu; periods],
        }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Check lengths and box constraints against `model`.
    pub fn validate(&self, model: &Model) -> Result<(), ModelError> {
        let n = model.periods();
        for len in [self.s.len(), self.mu.len()] {
            if len != n {
                return Err(ModelError::ControlLength { got: len, expected: n });
            }
        }
        for (t, (&s, &mu)) in self.s.iter().zip(&self.mu).enumerate() {
            if !(0.0..=1.0).contains(&s) {
                return Err(ModelError::OutOfBounds {
                    name: "s",
                    value: s,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            let cap = model.paths.mu_cap[t];
            if !(mu >= 0.0 && mu <= cap) {
                return Err(ModelError::OutOfBounds {
                    name: "mu",
                    value: mu,
                    lo: 0.0,
                    hi: cap,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// Unconstrained optimum (within the mitigation cap).
    Optimal,
    /// Optimum with the carbon price held below the configured cap.
    Baseline,
    /// Simulate the given controls without optimising.
    FixedControls(ControlPath),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Optimal => "optimal",
            Scenario::Baseline => "baseline",
            Scenario::FixedControls(_) => "fixed-controls",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    Infeasible,
    Stalled,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Stalled => "stalled",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "converged" => Ok(SolveStatus::Converged),
            "infeasible" => Ok(SolveStatus::Infeasible),
            "stalled" => Ok(SolveStatus::Stalled),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// Periods at which a simulation hit one of its safety nets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimulationFlags {
    pub capital_floor: Vec<usize>,
    pub consumption_floor: Vec<usize>,
    pub damage_clamped: Vec<usize>,
}

impl SimulationFlags {
    /// Whether the state collapsed onto a floor somewhere.
    pub fn collapsed(&self) -> bool {
        !self.capital_floor.is_empty() || !self.consumption_floor.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config_hash: String,
    pub settings: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<PeriodRecord>,
    pub provenance: Provenance,
    pub flags: SimulationFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub scenario: &'static str,
    pub status: SolveStatus,
    pub objective: f64,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub controls: ControlPath,
    pub trajectory: Trajectory,
    pub message: String,
    /// Index of the initial control path that produced the reported solution.
    pub start: usize,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}
