//! Forward simulation, the discounted-utility objective and its exact
//! gradient by a reverse (adjoint) sweep through the period transitions.

use std::f64::consts::LN_2;

use crate::config::ModelConfig;
use crate::damage::DamageChannel;
use crate::economy::{transition_unchecked, Controls, Detail, Model, ModelState, PeriodRecord};
use crate::error::ModelError;

use super::{ControlPath, Provenance, SimulationFlags, Trajectory};

/// Weight of the quadratic penalty on consumption below the floor.
pub const CONSUMPTION_PENALTY: f64 = 10.0;

/// CRRA utility `(c^(1-alpha) - 1) / (1 - alpha)`, `ln c` at `alpha = 1`.
pub fn utility(c: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        c.ln()
    } else {
        let e = 1.0 - alpha;
        (e * c.ln()).exp_m1() / e
    }
}

fn marginal_utility(c: f64, alpha: f64) -> f64 {
    c.powf(-alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    pub value: f64,
    /// Set when consumption fell below its floor or capital hit its floor in
    /// some period, so the value includes the penalty branch.
    pub penalized: bool,
}

/// Additive perturbations used for marginal-value calculations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Pulse {
    pub period: usize,
    /// Extra emissions, GtCO2/yr over the period.
    pub emissions: f64,
    /// Extra consumption, trillions USD/yr over the period.
    pub consumption: f64,
}

pub(crate) struct Forward {
    pub records: Vec<PeriodRecord>,
    /// State at the start of each period.
    pub states: Vec<ModelState>,
    pub details: Vec<Detail>,
    /// Total consumption per period including any pulse, trillions USD/yr.
    pub consumption: Vec<f64>,
    pub objective: f64,
    pub flags: SimulationFlags,
}

/// Discounted utility contribution of total consumption `cons` in period `t`
/// and its derivative with respect to `cons`. Below the floor utility is
/// continued linearly and a quadratic penalty is subtracted.
fn period_utility(model: &Model, t: usize, cons: f64) -> (f64, f64, bool) {
    let cfg = &model.config;
    let l = model.paths.population[t];
    let weight = cfg.grid.step() * (-cfg.rho() * cfg.grid.elapsed(t)).exp();
    let alpha = cfg.alpha();
    let floor = cfg.floors.consumption;
    if cons >= floor {
        let c = cons / l;
        (
            weight * l * utility(c, alpha),
            weight * marginal_utility(c, alpha),
            false,
        )
    } else {
        let cf = floor / l;
        let slope = marginal_utility(cf, alpha);
        let gap = floor - cons;
        let value = l * utility(cf, alpha) - slope * gap - CONSUMPTION_PENALTY * gap * gap;
        (weight * value, weight * (slope + 2.0 * CONSUMPTION_PENALTY * gap), true)
    }
}

/// Simulate without bound checks. Controls slightly outside their boxes are
/// allowed so that finite differences can straddle a bound, except that
/// `mu` must stay non-negative.
pub(crate) fn forward(model: &Model, s: &[f64], mu: &[f64], pulse: Option<Pulse>) -> Forward {
    let n = model.periods();
    let mut state = model.initial_state();
    let mut fw = Forward {
        records: Vec::with_capacity(n),
        states: Vec::with_capacity(n),
        details: Vec::with_capacity(n),
        consumption: Vec::with_capacity(n),
        objective: 0.0,
        flags: SimulationFlags::default(),
    };
    for t in 0..n {
        let p = pulse.filter(|p| p.period == t).unwrap_or_default();
        let (record, next, detail) =
            transition_unchecked(model, t, &state, Controls { s: s[t], mu: mu[t] }, p.emissions);
        let cons = record.consumption() + p.consumption;
        let (u, _, floored) = period_utility(model, t, cons);
        fw.objective += u;
        if floored {
            fw.flags.consumption_floor.push(t);
        }
        if detail.capital_floored {
            fw.flags.capital_floor.push(t);
        }
        if detail.damage_clamped {
            fw.flags.damage_clamped.push(t);
        }
        fw.records.push(record);
        fw.states.push(state);
        fw.details.push(detail);
        fw.consumption.push(cons);
        state = next;
    }
    fw
}

/// Adjoint sensitivities of the objective.
pub(crate) struct Gradient {
    pub d_s: Vec<f64>,
    pub d_mu: Vec<f64>,
    /// With respect to an emissions rate added in each period, per GtCO2/yr.
    pub d_emissions: Vec<f64>,
    /// With respect to a consumption rate added in each period, per trillion USD/yr.
    pub d_consumption: Vec<f64>,
}

/// Reverse sweep through the transitions recorded in `fw`.
pub(crate) fn adjoint(model: &Model, fw: &Forward) -> Gradient {
    let cfg = &model.config;
    let n = model.periods();
    let p = &model.paths;
    let cp = &model.climate;
    let gamma = cfg.gamma();
    let theta2 = cfg.theta2();
    let step = cfg.grid.step();
    let keep = (1.0 - cfg.delta()).powf(step);
    let lambda = cp.lambda();
    let b = &cp.transfer;

    let mut g = Gradient {
        d_s: vec![0.0; n],
        d_mu: vec![0.0; n],
        d_emissions: vec![0.0; n],
        d_consumption: vec![0.0; n],
    };
    // adjoints of the state entering period t + 1
    let mut b_k = 0.0;
    let mut b_m = [0.0f64; 3];
    let mut b_ta = 0.0;
    let mut b_tl = 0.0;

    for t in (0..n).rev() {
        let r = &fw.records[t];
        let st = &fw.states[t];
        let d = &fw.details[t];
        let (s, mu) = (r.s, r.mu);
        let sigma = p.sigma[t];
        let y_gross = r.y_gross;

        // climate
        let b_f = cp.c1 * b_ta;
        let m_at_next = b[0][0] * st.climate.m_at
            + b[0][1] * st.climate.m_up
            + b[0][2] * st.climate.m_lo
            + step * r.e_total / cp.gtco2_per_gtc;
        let mut b_mn = b_m;
        b_mn[0] += b_f * cp.f2x / (LN_2 * m_at_next);
        let b_e = b_mn[0] * step / cp.gtco2_per_gtc;
        let b_m_prev: [f64; 3] = std::array::from_fn(|j| (0..3).map(|i| b[i][j] * b_mn[i]).sum());
        let mut b_ta_prev = b_ta * (1.0 - cp.c1 * lambda - cp.c1 * cp.c3) + b_tl * cp.c4;
        let b_tl_prev = b_ta * cp.c1 * cp.c3 + b_tl * (1.0 - cp.c4);

        // capital accumulation
        let b_kraw = if d.capital_floored { 0.0 } else { b_k };
        let b_kcarry = b_kraw * keep;
        let mut b_y = b_kraw * step * s;
        let mut b_s = b_kraw * step * r.y_final;

        // utility
        let (_, b_c, _) = period_utility(model, t, fw.consumption[t]);
        b_y += b_c * (1.0 - s);
        b_s -= b_c * r.y_final;

        // output, abatement and emissions
        let b_yn = b_y;
        let b_ac = -b_y;
        let mut b_mu = -b_e * sigma * y_gross;
        if mu > 0.0 {
            b_mu += b_ac * d.abatement * theta2 / mu;
        }
        let b_yg = b_ac * d.abatement / y_gross + b_yn * d.omega + b_e * (1.0 - mu) * sigma;
        let b_omega = b_yn * y_gross;
        let k = st.economy.k;
        let (b_damage, b_k_from_carry) = match cfg.damage.channel {
            DamageChannel::Output | DamageChannel::Tfp => (-b_omega, b_kcarry),
            DamageChannel::Capital => {
                let one_minus = 1.0 - d.damage;
                (
                    -b_omega * gamma * one_minus.powf(gamma - 1.0) - b_kcarry * k,
                    b_kcarry * one_minus,
                )
            }
        };
        b_ta_prev += b_damage * d.d_slope;
        let b_k_prev = b_yg * gamma * y_gross / k + b_k_from_carry;

        g.d_s[t] = b_s;
        g.d_mu[t] = b_mu;
        g.d_emissions[t] = b_e;
        g.d_consumption[t] = b_c;

        b_k = b_k_prev;
        b_m = b_m_prev;
        b_ta = b_ta_prev;
        b_tl = b_tl_prev;
    }
    g
}

fn provenance(model: &Model, settings: &str) -> Provenance {
    Provenance {
        config_hash: model.config.hash(),
        settings: settings.to_string(),
    }
}

pub(crate) fn trajectory_from(model: &Model, fw: Forward, settings: &str) -> Trajectory {
    Trajectory {
        records: fw.records,
        provenance: provenance(model, settings),
        flags: fw.flags,
    }
}

/// Simulate `controls` forward and return the full trajectory.
pub fn simulate(model: &Model, controls: &ControlPath) -> Result<Trajectory, ModelError> {
    controls.validate(model)?;
    let fw = forward(model, &controls.s, &controls.mu, None);
    check_finite(&fw)?;
    Ok(trajectory_from(model, fw, "simulation"))
}

fn check_finite(fw: &Forward) -> Result<(), ModelError> {
    if !fw.objective.is_finite() {
        return Err(ModelError::NonFinite("objective"));
    }
    Ok(())
}

/// Discounted utility `sum_t step L_t u(c_t) e^(-rho (t - t0))` of `controls`.
pub fn evaluate_objective(controls: &ControlPath, config: &ModelConfig) -> Result<ObjectiveValue, ModelError> {
    let model = Model::new(config.clone())?;
    evaluate_objective_for(&model, controls)
}

/// [`evaluate_objective`] against an already-built model.
pub fn evaluate_objective_for(model: &Model, controls: &ControlPath) -> Result<ObjectiveValue, ModelError> {
    controls.validate(model)?;
    let fw = forward(model, &controls.s, &controls.mu, None);
    check_finite(&fw)?;
    Ok(ObjectiveValue {
        value: fw.objective,
        penalized: fw.flags.collapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damage::DamageSpec;

    fn model_with(a: f64, channel: DamageChannel) -> Model {
        let mut cfg = ModelConfig::default().with_damage_coefficient(a).unwrap();
        cfg.damage = DamageSpec { channel, ..cfg.damage };
        Model::new(cfg).unwrap()
    }

    fn varied_controls(n: usize) -> ControlPath {
        ControlPath {
            s: (0..n).map(|t| 0.22 + 0.05 * ((t as f64) * 0.3).sin()).collect(),
            mu: (0..n).map(|t| (0.1 + 0.02 * t as f64).min(0.95)).collect(),
        }
    }

    #[test]
    fn log_utility_and_unit_consumption() {
        assert_eq!(utility(1.0, 1.45), 0.0);
        assert_eq!(utility(1.0, 1.0), 0.0);
        assert_eq!(utility(std::f64::consts::E, 1.0), 1.0);
        assert!((utility(4.0, 2.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn crra_approaches_log_across_unit_elasticity() {
        for c in [0.3, 1.7, 12.0, 80.0] {
            let below = utility(c, 1.0 - 1e-6);
            let above = utility(c, 1.0 + 1e-6);
            let log = utility(c, 1.0);
            // the first-order term in (1 - alpha) is ln(c)^2 / 2
            let bound = 1e-6 * c.ln().powi(2) / 2.0 * 1.01 + 1e-15;
            assert!((below - log).abs() <= bound && (above - log).abs() <= bound);
            assert!((0.5 * (below + above) - log).abs() < 1e-10);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        for channel in [DamageChannel::Output, DamageChannel::Capital, DamageChannel::Tfp] {
            let model = model_with(0.01, channel);
            let n = model.periods();
            let c = varied_controls(n);
            let fw = forward(&model, &c.s, &c.mu, None);
            let g = adjoint(&model, &fw);
            for t in [0usize, 1, 7, 30, 62, 99] {
                for which in 0..2 {
                    let h = 1e-4;
                    let mut plus = c.clone();
                    let mut minus = c.clone();
                    let (p, m, an) = if which == 0 {
                        (&mut plus.s, &mut minus.s, g.d_s[t])
                    } else {
                        (&mut plus.mu, &mut minus.mu, g.d_mu[t])
                    };
                    p[t] += h;
                    m[t] -= h;
                    let fd = (forward(&model, &plus.s, &plus.mu, None).objective
                        - forward(&model, &minus.s, &minus.mu, None).objective)
                        / (2.0 * h);
                    let scale = an.abs().max(1e-2);
                    assert!(
                        (fd - an).abs() <= 1e-5 * scale,
                        "{channel:?} t={t} which={which}: fd {fd} adjoint {an}"
                    );
                }
            }
        }
    }

    #[test]
    fn pulse_sensitivities_match_central_differences() {
        let model = model_with(0.00236, DamageChannel::Output);
        let n = model.periods();
        let c = varied_controls(n);
        let fw = forward(&model, &c.s, &c.mu, None);
        let g = adjoint(&model, &fw);
        for t in [0usize, 10, 50] {
            let h = 1e-3;
            let run = |e: f64, x: f64| {
                forward(
                    &model,
                    &c.s,
                    &c.mu,
                    Some(Pulse {
                        period: t,
                        emissions: e,
                        consumption: x,
                    }),
                )
                .objective
            };
            let fd_e = (run(h, 0.0) - run(-h, 0.0)) / (2.0 * h);
            let fd_c = (run(0.0, h) - run(0.0, -h)) / (2.0 * h);
            assert!((fd_e - g.d_emissions[t]).abs() <= 1e-5 * g.d_emissions[t].abs());
            assert!((fd_c - g.d_consumption[t]).abs() <= 1e-5 * g.d_consumption[t].abs());
        }
    }

    #[test]
    fn gradient_through_the_consumption_floor() {
        let model = model_with(0.00236, DamageChannel::Output);
        let n = model.periods();
        let mut c = varied_controls(n);
        c.s[3] = 0.995;
        let fw = forward(&model, &c.s, &c.mu, None);
        assert_eq!(fw.flags.consumption_floor, vec![3]);
        let g = adjoint(&model, &fw);
        let h = 1e-7;
        let mut plus = c.clone();
        let mut minus = c.clone();
        plus.s[3] += h;
        minus.s[3] -= h;
        let fd = (forward(&model, &plus.s, &plus.mu, None).objective
            - forward(&model, &minus.s, &minus.mu, None).objective)
            / (2.0 * h);
        assert!((fd - g.d_s[3]).abs() <= 1e-5 * g.d_s[3].abs());
    }

    #[test]
    fn doubling_time_preference_lowers_welfare_when_consumption_exceeds_one() {
        let cfg = ModelConfig::default();
        let n = cfg.grid.periods;
        let c = ControlPath::constant(n, 0.25, 0.3);
        let w1 = evaluate_objective(&c, &cfg).unwrap();
        let mut cfg2 = cfg.clone();
        cfg2.preferences.time_preference *= 2.0;
        let w2 = evaluate_objective(&c, &cfg2).unwrap();
        let traj = simulate(&Model::new(cfg).unwrap(), &c).unwrap();
        assert!(traj.records.iter().all(|r| r.c_percap > 1.0));
        assert!(w2.value < w1.value);
    }

    #[test]
    fn objective_is_the_discounted_sum_of_period_utilities() {
        let model = Model::new(ModelConfig::default()).unwrap();
        let n = model.periods();
        let c = ControlPath::constant(n, 0.2, 0.5);
        let traj = simulate(&model, &c).unwrap();
        let oracle: f64 = traj
            .records
            .iter()
            .enumerate()
            .map(|(t, r)| {
                let l = model.paths.population[t];
                5.0 * l * (r.c_percap.powf(1.0 - 1.45) - 1.0) / (1.0 - 1.45) * (-0.015 * 5.0 * t as f64).exp()
            })
            .sum();
        let w = evaluate_objective_for(&model, &c).unwrap();
        assert!(!w.penalized);
        assert!((w.value - oracle).abs() <= 1e-10 * oracle.abs());
    }

    #[test]
    fn side_effect_free_and_deterministic() {
        let model = Model::new(ModelConfig::default()).unwrap();
        let c = varied_controls(model.periods());
        let a = evaluate_objective_for(&model, &c).unwrap();
        let b = evaluate_objective_for(&model, &c).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn controls_are_checked() {
        let model = Model::new(ModelConfig::default()).unwrap();
        let mut c = ControlPath::constant(model.periods(), 0.2, 0.5);
        c.mu[2] = -0.1;
        assert!(evaluate_objective_for(&model, &c).is_err());
        let short = ControlPath::constant(5, 0.2, 0.5);
        assert!(matches!(
            evaluate_objective_for(&model, &short),
            Err(ModelError::ControlLength { .. })
        ));
    }
}
