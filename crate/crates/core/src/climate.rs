//! Three-reservoir carbon cycle, radiative forcing and two-layer temperature
//! response. All coefficients are per model period.

use crate::config::ModelConfig;
use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClimateState {
    /// Atmospheric carbon, GtC.
    pub m_at: f64,
    /// Upper ocean and biosphere carbon, GtC.
    pub m_up: f64,
    /// Deep ocean carbon, GtC.
    pub m_lo: f64,
    /// Atmospheric temperature anomaly, degrees C.
    pub t_at: f64,
    /// Lower ocean temperature anomaly, degrees C.
    pub t_lo: f64,
}

impl ClimateState {
    pub fn total_carbon(&self) -> f64 {
        self.m_at + self.m_up + self.m_lo
    }

    fn reservoirs(&self) -> [f64; 3] {
        [self.m_at, self.m_up, self.m_lo]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClimateParams {
    /// `next[i] = sum_j transfer[i][j] * current[j]` over (atmosphere, upper, lower).
    pub transfer: [[f64; 3]; 3],
    pub gtco2_per_gtc: f64,
    /// Pre-industrial atmospheric carbon, GtC.
    pub m_pre: f64,
    /// Forcing from a doubling of atmospheric CO2, W/m2.
    pub f2x: f64,
    /// Equilibrium climate sensitivity, degrees C per doubling.
    pub ecs: f64,
    /// Speed of adjustment of the atmospheric layer.
    pub c1: f64,
    /// Heat exchange coefficient between the layers.
    pub c3: f64,
    /// Speed of adjustment of the lower ocean.
    pub c4: f64,
    /// Non-CO2 forcing per period, W/m2.
    pub f_exo: Vec<f64>,
}

impl ClimateParams {
    /// Build the transfer matrix and forcing path from a validated config.
    pub fn from_config(config: &ModelConfig) -> Self {
        let c = &config.carbon;
        let b12 = c.atmosphere_to_upper;
        let b23 = c.upper_to_lower;
        let b21 = b12 * c.equilibrium_atmosphere / c.equilibrium_upper;
        let b32 = b23 * c.equilibrium_upper / c.equilibrium_lower;
        let transfer = [
            [1.0 - b12, b21, 0.0],
            [b12, 1.0 - b21 - b23, b32],
            [0.0, b23, 1.0 - b32],
        ];
        let k = &config.climate;
        let ramp = k.exo_forcing_ramp_periods;
        let f_exo = (0..config.grid.periods)
            .map(|t| {
                if ramp == 0 || t >= ramp {
                    k.exo_forcing_final
                } else {
                    k.exo_forcing_initial + (k.exo_forcing_final - k.exo_forcing_initial) * t as f64 / ramp as f64
                }
            })
            .collect();
        ClimateParams {
            transfer,
            gtco2_per_gtc: c.gtco2_per_gtc,
            m_pre: c.preindustrial_atmosphere,
            f2x: k.forcing_per_doubling,
            ecs: k.sensitivity,
            c1: k.upper_response,
            c3: k.exchange,
            c4: k.lower_response,
            f_exo,
        }
    }

    /// Radiative restoring per degree of warming, `f2x / ecs`.
    pub fn lambda(&self) -> f64 {
        self.f2x / self.ecs
    }

    /// Largest deviation of a transfer-matrix column sum from one.
    pub fn conservation_defect(&self) -> f64 {
        (0..3)
            .map(|j| ((0..3).map(|i| self.transfer[i][j]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn exo_forcing(&self, period: usize) -> f64 {
        self.f_exo.get(period).or(self.f_exo.last()).copied().unwrap_or(0.0)
    }
}

pub fn initial_climate_state(config: &ModelConfig) -> ClimateState {
    let c = &config.carbon;
    ClimateState {
        m_at: c.initial_atmosphere,
        m_up: c.initial_upper,
        m_lo: c.initial_lower,
        t_at: config.climate.initial_atmosphere_temp,
        t_lo: config.climate.initial_ocean_temp,
    }
}

/// Advance the reservoirs by one period, injecting `emissions` (GtCO2 over
/// the whole period, negative for net removal) into the atmosphere.
pub fn step_carbon(state: &ClimateState, emissions: f64, params: &ClimateParams) -> Result<ClimateState, ModelError> {
    if !emissions.is_finite() {
        return Err(ModelError::NonFinite("emissions"));
    }
    let m = state.reservoirs();
    if m.iter().any(|x| !x.is_finite()) {
        return Err(ModelError::NonFinite("carbon reservoir"));
    }
    let b = &params.transfer;
    let next: [f64; 3] = std::array::from_fn(|i| b[i][0] * m[0] + b[i][1] * m[1] + b[i][2] * m[2]);
    Ok(ClimateState {
        m_at: next[0] + emissions / params.gtco2_per_gtc,
        m_up: next[1],
        m_lo: next[2],
        ..*state
    })
}

/// Radiative forcing in W/m2 at atmospheric carbon `m_at` in period `period`.
pub fn forcing(m_at: f64, params: &ClimateParams, period: usize) -> Result<f64, ModelError> {
    if !(m_at.is_finite() && m_at > 0.0) {
        return Err(ModelError::NonPositive("atmospheric carbon"));
    }
    Ok(params.f2x * (m_at / params.m_pre).log2() + params.exo_forcing(period))
}

/// Advance both temperature layers one period under `forcing` (the forcing
/// at the end of the period).
pub fn step_temperature(
    state: &ClimateState,
    forcing: f64,
    params: &ClimateParams,
) -> Result<ClimateState, ModelError> {
    if !forcing.is_finite() {
        return Err(ModelError::NonFinite("forcing"));
    }
    if !(state.t_at.is_finite() && state.t_lo.is_finite()) {
        return Err(ModelError::NonFinite("temperature"));
    }
    let t_at =
        state.t_at + params.c1 * (forcing - params.lambda() * state.t_at - params.c3 * (state.t_at - state.t_lo));
    let t_lo = state.t_lo + params.c4 * (state.t_at - state.t_lo);
    Ok(ClimateState { t_at, t_lo, ..*state })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ClimateParams {
        ClimateParams::from_config(&ModelConfig::default())
    }

    fn identity(mut p: ClimateParams) -> ClimateParams {
        p.transfer = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        p
    }

    fn state() -> ClimateState {
        initial_climate_state(&ModelConfig::default())
    }

    #[test]
    fn default_matrix_conserves_mass() {
        let p = params();
        assert!(p.conservation_defect() < 1e-12);
        // b21 = 0.12 * 588 / 360
        assert!((p.transfer[0][1] - 0.196).abs() < 1e-12);
    }

    #[test]
    fn identity_transfer_without_emissions_is_a_no_op() {
        let p = identity(params());
        assert_eq!(step_carbon(&state(), 0.0, &p).unwrap(), state());
    }

    #[test]
    fn zero_emissions_conserve_total_carbon() {
        let p = params();
        let s0 = state();
        let s1 = step_carbon(&s0, 0.0, &p).unwrap();
        assert!((s1.total_carbon() - s0.total_carbon()).abs() <= 1e-9 * s0.total_carbon());
    }

    #[test]
    fn emissions_are_converted_to_carbon() {
        let p = identity(params());
        let s1 = step_carbon(&state(), 36.64, &p).unwrap();
        assert!((s1.m_at - state().m_at - 10.0).abs() < 1e-12);
        let s2 = step_carbon(&state(), -36.64, &p).unwrap();
        assert!((s2.m_at - state().m_at + 10.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        let p = params();
        assert!(step_carbon(&state(), f64::NAN, &p).is_err());
        assert!(step_temperature(&state(), f64::INFINITY, &p).is_err());
        assert!(forcing(0.0, &p, 0).is_err());
        assert!(forcing(-3.0, &p, 0).is_err());
    }

    #[test]
    fn forcing_values() {
        let mut p = params();
        p.f_exo = vec![0.0, 0.5];
        assert_eq!(forcing(p.m_pre, &p, 0).unwrap(), 0.0);
        assert!((forcing(2.0 * p.m_pre, &p, 0).unwrap() - p.f2x).abs() < 1e-12);
        assert!((forcing(4.0 * p.m_pre, &p, 1).unwrap() - (2.0 * p.f2x + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn exogenous_forcing_ramp() {
        let p = params();
        assert_eq!(p.f_exo[0], 0.5);
        assert!((p.f_exo[1] - (0.5 + 0.5 / 17.0)).abs() < 1e-15);
        assert_eq!(p.f_exo[17], 1.0);
        assert_eq!(p.f_exo[99], 1.0);
    }

    #[test]
    fn temperature_fixed_points() {
        let p = params();
        let s = ClimateState {
            t_at: 1.3,
            t_lo: 1.3,
            ..state()
        };
        let next = step_temperature(&s, p.lambda() * 1.3, &p).unwrap();
        assert!((next.t_at - 1.3).abs() < 1e-15);
        assert!((next.t_lo - 1.3).abs() < 1e-15);

        let rest = ClimateState {
            t_at: 0.0,
            t_lo: 0.0,
            ..state()
        };
        assert_eq!(step_temperature(&rest, 0.0, &p).unwrap(), rest);
    }

    #[test]
    fn sustained_doubling_forcing_reaches_the_sensitivity() {
        let p = params();
        let mut s = ClimateState {
            t_at: 0.0,
            t_lo: 0.0,
            ..state()
        };
        // 2000 years of 5-year periods
        for _ in 0..400 {
            s = step_temperature(&s, p.f2x, &p).unwrap();
        }
        assert!((s.t_at - p.ecs).abs() < 1e-3, "t_at = {}", s.t_at);
    }
}
