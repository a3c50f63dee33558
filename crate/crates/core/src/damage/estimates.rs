//! Published point estimates of the total impact of warming on global income.

use serde::Deserialize;

use super::DamageError;

const ESTIMATES_CSV: &str = include_str!("../../data/estimates.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    Enumeration,
    Statistical,
    Cge,
    ExpertElicitation,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EstimatePoint {
    pub study: String,
    /// Warming above pre-industrial, degrees C.
    #[serde(rename = "warming_c")]
    pub warming: f64,
    /// Change in global income, percent of GDP (negative is a loss).
    #[serde(rename = "impact_pct")]
    pub impact: f64,
    pub method: EstimateMethod,
    pub coverage: String,
}

/// The 19 embedded estimate points, in table order.
pub fn estimate_points() -> Vec<EstimatePoint> {
    let mut rdr = csv::Reader::from_reader(ESTIMATES_CSV.as_bytes());
    rdr.deserialize()
        .map(|r| r.expect("embedded estimate table is well formed"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticDamageFit {
    /// Coefficient `a` of `D = a dT^2`.
    pub a: f64,
    /// Per-point residual `impact + 100 a dT^2`, percentage points.
    pub residuals: Vec<f64>,
    /// Root-mean-square residual, percentage points.
    pub rmse: f64,
}

/// Least-squares `a` minimising `sum (impact_i + a dT_i^2)^2` with impacts
/// taken as fractions of GDP. Points are `(warming, impact_pct)`.
pub fn fit_quadratic_to_points(points: &[(f64, f64)]) -> Result<QuadraticDamageFit, DamageError> {
    let sxx: f64 = points.iter().map(|&(t, _)| t.powi(4)).sum();
    if points.is_empty() || sxx == 0.0 {
        return Err(DamageError::Degenerate);
    }
    let sxy: f64 = points.iter().map(|&(t, p)| t * t * p / 100.0).sum();
    let a = -sxy / sxx;
    let residuals: Vec<f64> = points.iter().map(|&(t, p)| p + 100.0 * a * t * t).collect();
    let rmse = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(QuadraticDamageFit { a, residuals, rmse })
}

impl EstimatePoint {
    pub fn as_pair(&self) -> (f64, f64) {
        (self.warming, self.impact)
    }
}
