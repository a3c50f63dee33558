//! Independent solves over a list of damage coefficients.

use rayon::prelude::*;

use crate::config::ModelConfig;
use crate::economy::Model;
use crate::error::ModelError;
use crate::units::PER_CAPITA_USD;

use super::solver::solve_model;
use super::{Scenario, SolveReport, SolveStatus, SolverSettings};

/// Headline statistics of one solved trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub a: f64,
    pub status: SolveStatus,
    pub objective: f64,
    pub peak_damage: f64,
    /// Atmospheric temperature in the period of peak damage.
    pub peak_damage_temp: f64,
    pub peak_temp: f64,
    pub min_k_over_y: f64,
    pub min_k_over_y_year: i32,
    /// Minimum consumption per capita, USD/yr.
    pub min_c_percap: f64,
    pub min_c_year: i32,
    /// First year after the consumption minimum in which consumption per
    /// capita is back above its first-period level.
    pub recovery_year: Option<i32>,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub a: f64,
    pub result: Result<SolveReport, String>,
}

impl SweepRow {
    pub fn summary(&self) -> Option<SweepSummary> {
        self.result.as_ref().ok().map(|r| summarize(self.a, r))
    }
}

pub fn summarize(a: f64, report: &SolveReport) -> SweepSummary {
    let recs = &report.trajectory.records;
    let argmax = |f: &dyn Fn(usize) -> f64| (0..recs.len()).max_by(|&i, &j| f(i).total_cmp(&f(j))).unwrap_or(0);
    let argmin = |f: &dyn Fn(usize) -> f64| (0..recs.len()).min_by(|&i, &j| f(i).total_cmp(&f(j))).unwrap_or(0);
    let peak = argmax(&|i| recs[i].damage_frac);
    let hottest = argmax(&|i| recs[i].t_at);
    let ky = argmin(&|i| recs[i].k_over_y);
    let poorest = argmin(&|i| recs[i].c_percap);
    let start = recs[0].c_percap;
    let recovery_year = if poorest == 0 {
        None
    } else {
        recs[poorest..].iter().find(|r| r.c_percap >= start).map(|r| r.year)
    };
    SweepSummary {
        a,
        status: report.status,
        objective: report.objective,
        peak_damage: recs[peak].damage_frac,
        peak_damage_temp: recs[peak].t_at,
        peak_temp: recs[hottest].t_at,
        min_k_over_y: recs[ky].k_over_y,
        min_k_over_y_year: recs[ky].year,
        min_c_percap: recs[poorest].c_percap * PER_CAPITA_USD,
        min_c_year: recs[poorest].year,
        recovery_year,
    }
}

/// Solve `scenario` once per damage coefficient, in parallel. Failures of
/// individual runs are recorded in their row.
pub fn sensitivity_sweep(
    config: &ModelConfig,
    a_values: &[f64],
    scenario: &Scenario,
    settings: &SolverSettings,
) -> Result<Vec<SweepRow>, ModelError> {
    for &a in a_values {
        if !(a.is_finite() && a >= 0.0) {
            return Err(ModelError::OutOfBounds {
                name: "a",
                value: a,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    Ok(a_values
        .par_iter()
        .map(|&a| {
            let result = config
                .with_damage_coefficient(a)
                .map_err(ModelError::from)
                .and_then(Model::new)
                .and_then(|m| solve_model(&m, scenario, settings))
                .map_err(|e| e.to_string());
            SweepRow { a, result }
        })
        .collect())
}
