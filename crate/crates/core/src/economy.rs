//! Production, damage and abatement wedges, emissions, carbon-price algebra
//! and capital accumulation for one model period.
//!
//! Emissions and abatement costs scale with gross (undamaged) output in every
//! damage channel. Under the capital channel the damaged capital stock is
//! the one carried into the next period; under the TFP channel the damage
//! applies to the period's productivity only because TFP is exogenous.

use crate::climate::{self, ClimateParams, ClimateState};
use crate::config::{exogenous_paths, ExogenousPaths, ModelConfig};
use crate::damage::DamageChannel;
use crate::error::ModelError;
use crate::ramsey;
use crate::units::{PER_CAPITA_USD, PRICE_TIMES_GTCO2_IN_TRILLIONS};

/// `A L^(1-gamma) K^gamma`.
pub fn gross_output(tfp: f64, population: f64, capital: f64, gamma: f64) -> Result<f64, ModelError> {
    for (name, v) in [("tfp", tfp), ("population", population), ("capital", capital)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(ModelError::NonPositive(name));
        }
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(ModelError::OutOfBounds {
            name: "gamma",
            value: gamma,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(cobb_douglas(tfp, population, capital, gamma))
}

#[inline]
fn cobb_douglas(tfp: f64, population: f64, capital: f64, gamma: f64) -> f64 {
    tfp * population.powf(1.0 - gamma) * capital.powf(gamma)
}

/// `(1 - mu) sigma Y_G`, GtCO2/yr; negative when `mu > 1`.
pub fn industrial_emissions(mu: f64, sigma: f64, y_gross: f64) -> f64 {
    (1.0 - mu) * sigma * y_gross
}

/// `p_BS mu^theta2 / theta2 * sigma Y_G`, trillions USD/yr, with `p_bs` in USD/tCO2.
pub fn abatement_cost(mu: f64, sigma: f64, y_gross: f64, p_bs: f64, theta2: f64) -> f64 {
    PRICE_TIMES_GTCO2_IN_TRILLIONS * p_bs * mu.powf(theta2) / theta2 * sigma * y_gross
}

/// Carbon taxes paid on industrial emissions, trillions USD/yr.
pub fn carbon_tax(p_c: f64, mu: f64, sigma: f64, y_gross: f64) -> f64 {
    PRICE_TIMES_GTCO2_IN_TRILLIONS * p_c * industrial_emissions(mu, sigma, y_gross)
}

/// Emissions-reduction rate minimising taxes plus abatement cost at price `p_c`.
pub fn optimal_mitigation(p_c: f64, p_bs: f64, theta2: f64, mu_cap: f64) -> f64 {
    (p_c.max(0.0) / p_bs).powf(1.0 / (theta2 - 1.0)).min(mu_cap)
}

/// Carbon price that induces firms to choose `mu`.
pub fn carbon_price_for(mu: f64, p_bs: f64, theta2: f64) -> f64 {
    mu.powf(theta2 - 1.0) * p_bs
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapitalStep {
    pub k: f64,
    pub floored: bool,
}

/// `k (1 - delta)^step + step s y_final`, floored at `floor`.
pub fn step_capital(k: f64, y_final: f64, s: f64, delta: f64, step_years: f64, floor: f64) -> CapitalStep {
    let raw = k * (1.0 - delta).powf(step_years) + step_years * s * y_final;
    if raw < floor || raw.is_nan() {
        CapitalStep {
            k: floor,
            floored: true,
        }
    } else {
        CapitalStep { k: raw, floored: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomyState {
    /// Capital stock, trillions USD.
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelState {
    pub economy: EconomyState,
    pub climate: ClimateState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    /// Savings rate.
    pub s: f64,
    /// Emissions-reduction rate.
    pub mu: f64,
}

/// Everything reported for one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodRecord {
    pub year: i32,
    pub y_gross: f64,
    pub y_net: f64,
    pub y_final: f64,
    /// Fraction of gross output lost to damages (through any channel).
    pub damage_frac: f64,
    /// Abatement cost as a share of net output.
    pub lambda: f64,
    pub e_ind: f64,
    pub e_total: f64,
    pub mu: f64,
    pub s: f64,
    /// Consumption per capita, thousands USD/yr.
    pub c_percap: f64,
    /// Carbon price, USD/tCO2.
    pub p_c: f64,
    /// Capital over gross output, years.
    pub k_over_y: f64,
    pub t_at: f64,
    pub k: f64,
    pub m_at: f64,
}

impl PeriodRecord {
    /// Total consumption, trillions USD/yr.
    pub fn consumption(&self) -> f64 {
        (1.0 - self.s) * self.y_final
    }

    pub fn c_percap_usd(&self) -> f64 {
        self.c_percap * PER_CAPITA_USD
    }
}

/// A configuration together with its derived paths and climate coefficients.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: ModelConfig,
    pub paths: ExogenousPaths,
    pub climate: ClimateParams,
    /// Savings rate imposed on the final `config.terminal.periods` periods.
    pub terminal_savings: f64,
}

impl Model {
    pub fn new(config: ModelConfig) -> Result<Self, ModelError> {
        let paths = exogenous_paths(&config)?;
        let climate = ClimateParams::from_config(&config);
        let terminal_savings = ramsey::steady_state_savings_rate(
            config.gamma(),
            config.delta(),
            config.rho(),
            config.alpha(),
            config.terminal.growth,
        );
        Ok(Model {
            config,
            paths,
            climate,
            terminal_savings,
        })
    }

    pub fn periods(&self) -> usize {
        self.config.grid.periods
    }

    pub fn initial_state(&self) -> ModelState {
        ModelState {
            economy: EconomyState {
                k: self.config.production.initial_capital,
            },
            climate: climate::initial_climate_state(&self.config),
        }
    }

    /// Whether the savings rate of `period` is frozen at the terminal value.
    pub fn savings_frozen(&self, period: usize) -> bool {
        period + self.config.terminal.periods >= self.periods()
    }
}

/// Intermediate values of one transition, kept for the adjoint pass.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Detail {
    pub damage: f64,
    pub d_slope: f64,
    pub damage_clamped: bool,
    pub capital_floored: bool,
    /// `(1 - D)^e`, the net-to-gross output factor.
    pub omega: f64,
    pub abatement: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next: ModelState,
    pub record: PeriodRecord,
    pub capital_floored: bool,
    pub damage_clamped: bool,
}

/// One period of the coupled model: production, damages, abatement,
/// emissions, then the carbon, temperature and capital updates.
pub fn period_transition(
    model: &Model,
    period: usize,
    state: &ModelState,
    controls: Controls,
) -> Result<Transition, ModelError> {
    let n = model.periods();
    if period >= n {
        return Err(ModelError::Period { period, periods: n });
    }
    let cap = model.paths.mu_cap[period];
    if !(controls.s >= 0.0 && controls.s <= 1.0) {
        return Err(ModelError::OutOfBounds {
            name: "s",
            value: controls.s,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if !(controls.mu >= 0.0 && controls.mu <= cap) {
        return Err(ModelError::OutOfBounds {
            name: "mu",
            value: controls.mu,
            lo: 0.0,
            hi: cap,
        });
    }
    if !(state.economy.k.is_finite() && state.economy.k > 0.0) {
        return Err(ModelError::NonPositive("capital"));
    }
    if !(state.climate.m_at.is_finite() && state.climate.m_at > 0.0) {
        return Err(ModelError::NonPositive("atmospheric carbon"));
    }
    let (record, next, detail) = transition_unchecked(model, period, state, controls, 0.0);
    for v in [next.climate.m_at, next.climate.t_at, next.climate.t_lo, next.economy.k] {
        if !v.is_finite() {
            return Err(ModelError::NonFinite("next state"));
        }
    }
    Ok(Transition {
        next,
        record,
        capital_floored: detail.capital_floored,
        damage_clamped: detail.damage_clamped,
    })
}

pub(crate) fn transition_unchecked(
    model: &Model,
    t: usize,
    state: &ModelState,
    controls: Controls,
    extra_emissions: f64,
) -> (PeriodRecord, ModelState, Detail) {
    let cfg = &model.config;
    let p = &model.paths;
    let gamma = cfg.gamma();
    let step = cfg.grid.step();
    let Controls { s, mu } = controls;
    let k = state.economy.k;
    let t_at = state.climate.t_at;

    let (d, d_slope, damage_clamped) = cfg.damage.clamped(t_at);
    let y_gross = cobb_douglas(p.tfp[t], p.population[t], k, gamma);
    let (omega, k_carry) = match cfg.damage.channel {
        DamageChannel::Output | DamageChannel::Tfp => (1.0 - d, k),
        DamageChannel::Capital => ((1.0 - d).powf(gamma), (1.0 - d) * k),
    };
    let y_net = omega * y_gross;
    let sigma = p.sigma[t];
    let p_bs = p.backstop_price[t];
    let theta2 = cfg.theta2();
    let abatement = abatement_cost(mu, sigma, y_gross, p_bs, theta2);
    let y_final = y_net - abatement;
    let e_ind = industrial_emissions(mu, sigma, y_gross);
    let e_total = e_ind + p.land_emissions[t] + extra_emissions;

    let step_k = step_capital(k_carry, y_final, s, cfg.delta(), step, cfg.floors.capital);

    let params = &model.climate;
    let carbon = {
        let b = &params.transfer;
        let m = [state.climate.m_at, state.climate.m_up, state.climate.m_lo];
        let nm: [f64; 3] = std::array::from_fn(|i| b[i][0] * m[0] + b[i][1] * m[1] + b[i][2] * m[2]);
        (nm[0] + step * e_total / params.gtco2_per_gtc, nm[1], nm[2])
    };
    let forcing_next = params.f2x * (carbon.0 / params.m_pre).log2() + params.exo_forcing(t + 1);
    let t_at_next =
        t_at + params.c1 * (forcing_next - params.lambda() * t_at - params.c3 * (t_at - state.climate.t_lo));
    let t_lo_next = state.climate.t_lo + params.c4 * (t_at - state.climate.t_lo);

    let record = PeriodRecord {
        year: p.years[t],
        y_gross,
        y_net,
        y_final,
        damage_frac: 1.0 - omega,
        lambda: abatement / y_net,
        e_ind,
        e_total,
        mu,
        s,
        c_percap: (1.0 - s) * y_final / p.population[t],
        p_c: carbon_price_for(mu, p_bs, theta2),
        k_over_y: k / y_gross,
        t_at,
        k,
        m_at: state.climate.m_at,
    };
    let next = ModelState {
        economy: EconomyState { k: step_k.k },
        climate: ClimateState {
            m_at: carbon.0,
            m_up: carbon.1,
            m_lo: carbon.2,
            t_at: t_at_next,
            t_lo: t_lo_next,
        },
    };
    let detail = Detail {
        damage: d,
        d_slope,
        damage_clamped,
        capital_floored: step_k.floored,
        omega,
        abatement,
    };
    (record, next, detail)
}
