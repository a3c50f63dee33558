//! Social cost of carbon: the consumption-equivalent welfare loss of one
//! more tonne of CO2 emitted in a given period, with controls held fixed.

use thiserror::Error;

use crate::economy::Model;
use crate::units::TRILLIONS_PER_GTCO2_IN_USD_PER_T;

use super::simulate::{adjoint, forward, Pulse};
use super::{SolveReport, SolveStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SccError {
    #[error("social cost of carbon needs a converged solution, report is {0}")]
    NotConverged(SolveStatus),
    #[error("period {period} outside the {periods}-period horizon")]
    Period { period: usize, periods: usize },
    #[error("pulse size must be positive and finite, got {0}")]
    Pulse(f64),
    #[error("marginal utility of consumption is not positive in period {0}")]
    Degenerate(usize),
}

fn check(model: &Model, report: &SolveReport, period: usize) -> Result<(), SccError> {
    if report.status != SolveStatus::Converged {
        return Err(SccError::NotConverged(report.status));
    }
    if period >= model.periods() {
        return Err(SccError::Period {
            period,
            periods: model.periods(),
        });
    }
    Ok(())
}

/// SCC in period `period`, USD/tCO2, by central differences of the
/// objective in an emissions pulse of `pulse_gtco2` GtCO2 spread over the
/// period and in a matching consumption pulse.
pub fn social_cost_of_carbon(
    model: &Model,
    report: &SolveReport,
    period: usize,
    pulse_gtco2: f64,
) -> Result<f64, SccError> {
    check(model, report, period)?;
    if !(pulse_gtco2 > 0.0 && pulse_gtco2.is_finite()) {
        return Err(SccError::Pulse(pulse_gtco2));
    }
    let c = &report.controls;
    let step = model.config.grid.step();
    let run = |emissions: f64, consumption: f64| {
        forward(
            model,
            &c.s,
            &c.mu,
            Some(Pulse {
                period,
                emissions,
                consumption,
            }),
        )
        .objective
    };
    // both pulses are annual rates over the period
    let e = pulse_gtco2 / step;
    let x = 1e-3 * e;
    let d_e = (run(e, 0.0) - run(-e, 0.0)) / (2.0 * e);
    let d_c = (run(0.0, x) - run(0.0, -x)) / (2.0 * x);
    if d_c.is_nan() || d_c <= 0.0 {
        return Err(SccError::Degenerate(period));
    }
    Ok(-TRILLIONS_PER_GTCO2_IN_USD_PER_T * d_e / d_c)
}

/// SCC for every period from the adjoint sensitivities, USD/tCO2.
pub fn social_cost_of_carbon_adjoint(model: &Model, report: &SolveReport) -> Result<Vec<f64>, SccError> {
    check(model, report, 0)?;
    let c = &report.controls;
    let g = adjoint(model, &forward(model, &c.s, &c.mu, None));
    g.d_emissions
        .iter()
        .zip(&g.d_consumption)
        .enumerate()
        .map(|(t, (e, x))| {
            if *x > 0.0 {
                Ok(-TRILLIONS_PER_GTCO2_IN_USD_PER_T * e / x)
            } else {
                Err(SccError::Degenerate(t))
            }
        })
        .collect()
}
