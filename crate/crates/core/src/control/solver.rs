//! Box-constrained maximisation of discounted utility over the savings and
//! emissions-reduction paths.
//!
//! Each start runs a projected Newton method: variables within `eps` of a
//! bound whose gradient pushes outward are held by a scaled gradient step,
//! the rest take a Newton step on a positive-definite modification of the
//! Hessian, and an Armijo search runs along the projection arc. Gradients
//! come from the adjoint sweep; the Hessian is a central difference of
//! gradients.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ModelConfig;
use crate::economy::{optimal_mitigation, Model};
use crate::error::ModelError;

use super::simulate::{adjoint, forward, trajectory_from};
use super::{ControlPath, Scenario, SolveReport, SolveStatus};

/// Number of documented initial control paths.
pub const STARTS: usize = 5;
/// Consecutive collapsed starts after which a problem is declared infeasible.
const INFEASIBLE_RUN: usize = 3;
const ARMIJO: f64 = 1e-4;
const HESSIAN_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Bound on the projected-gradient residual `|x - P(x + grad W)|_inf`.
    pub tol: f64,
    /// Newton iterations per start.
    pub max_iter: usize,
    /// Seed permuting the order in which the starts are tried.
    pub seed: u64,
    /// How many of the documented starts to try.
    pub starts: usize,
    /// Number of damage-coefficient stages each start is walked through,
    /// solving at `a k / stages` for `k = 1..=stages`.
    pub continuation: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-6,
            max_iter: 200,
            seed: 0,
            starts: STARTS,
            continuation: 4,
        }
    }
}

impl fmt::Display for SolverSettings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "projected-newton tol={:e} max_iter={} seed={} starts={} continuation={}",
            self.tol, self.max_iter, self.seed, self.starts, self.continuation
        )
    }
}

/// Decision vector `x = [s_0 .. s_{nf-1}, mu_0 .. mu_{n-1}]`; the savings
/// rates of the final periods are fixed.
struct Problem<'a> {
    model: &'a Model,
    free_s: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

struct Eval {
    value: f64,
    grad: Vec<f64>,
    collapsed: bool,
}

impl<'a> Problem<'a> {
    fn new(model: &'a Model, baseline: bool) -> Self {
        let n = model.periods();
        let free_s = n - model.config.terminal.periods;
        let theta2 = model.config.theta2();
        let mut lo = vec![0.0; free_s + n];
        let mut hi = vec![1.0; free_s + n];
        for t in 0..n {
            let cap = model.paths.mu_cap[t];
            hi[free_s + t] = if baseline {
                let price = model.config.carbon_price_cap.at(model.config.grid.elapsed(t));
                optimal_mitigation(price, model.paths.backstop_price[t], theta2, cap)
            } else {
                cap
            };
            lo[free_s + t] = 0.0;
        }
        if let Some(mu0) = model.config.abatement.initial_rate {
            let v = mu0.min(hi[free_s]);
            lo[free_s] = v;
            hi[free_s] = v;
        }
        Problem { model, free_s, lo, hi }
    }

    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn controls(&self, x: &[f64]) -> ControlPath {
        let n = self.model.periods();
        let mut s = vec![self.model.terminal_savings; n];
        s[..self.free_s].copy_from_slice(&x[..self.free_s]);
        ControlPath {
            s,
            mu: x[self.free_s..].to_vec(),
        }
    }

    fn project(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(*lo, *hi);
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let c = self.controls(x);
        forward(self.model, &c.s, &c.mu, None).objective
    }

    fn eval(&self, x: &[f64]) -> Eval {
        let c = self.controls(x);
        let fw = forward(self.model, &c.s, &c.mu, None);
        let g = adjoint(self.model, &fw);
        let mut grad = g.d_s[..self.free_s].to_vec();
        grad.extend_from_slice(&g.d_mu);
        Eval {
            value: fw.objective,
            grad,
            collapsed: fw.flags.collapsed(),
        }
    }

    /// `|x - P(x + grad)|_inf`.
    fn kkt(&self, x: &[f64], grad: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| (x[i] - (x[i] + grad[i]).clamp(self.lo[i], self.hi[i])).abs())
            .fold(0.0, f64::max)
    }

    /// Hessian of the objective by differences of adjoint gradients, one
    /// column per variable, evaluated in parallel.
    fn hessian(&self, x: &[f64], grad: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let cols: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut xp = x.to_vec();
                if x[j] - HESSIAN_STEP < 0.0 {
                    // mu cannot go negative; fall back to a forward difference
                    let h = HESSIAN_STEP * 0.01;
                    xp[j] += h;
                    let gp = self.eval(&xp).grad;
                    gp.iter().zip(grad).map(|(a, b)| (a - b) / h).collect()
                } else {
                    let mut xm = x.to_vec();
                    xp[j] += HESSIAN_STEP;
                    xm[j] -= HESSIAN_STEP;
                    let gp = self.eval(&xp).grad;
                    let gm = self.eval(&xm).grad;
                    gp.iter()
                        .zip(&gm)
                        .map(|(a, b)| (a - b) / (2.0 * HESSIAN_STEP))
                        .collect()
                }
            })
            .collect();
        let h = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
        (&h + h.transpose()) * 0.5
    }
}

struct StartResult {
    x: Vec<f64>,
    value: f64,
    kkt: f64,
    iterations: usize,
    collapsed: bool,
    note: &'static str,
}

/// Projected Newton ascent from `x0`.
fn run_start(problem: &Problem, x0: Vec<f64>, settings: &SolverSettings) -> StartResult {
    let n = problem.dim();
    let mut x = x0;
    problem.project(&mut x);
    let mut ev = problem.eval(&x);
    let mut iterations = 0;
    let mut note = "iteration limit reached";
    loop {
        let kkt = problem.kkt(&x, &ev.grad);
        if kkt <= settings.tol {
            note = "projected gradient below tolerance";
            break;
        }
        if iterations >= settings.max_iter {
            break;
        }
        iterations += 1;

        // minimise f = -W
        let g: Vec<f64> = ev.grad.iter().map(|v| -v).collect();
        let eps = kkt.min(1e-3);
        let active: Vec<bool> = (0..n)
            .map(|i| (x[i] - problem.lo[i] <= eps && g[i] > 0.0) || (problem.hi[i] - x[i] <= eps && g[i] < 0.0))
            .collect();
        let hess = -problem.hessian(&x, &ev.grad);
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();

        let mut d = vec![0.0; n];
        for i in 0..n {
            if active[i] {
                d[i] = -g[i] / hess[(i, i)].abs().max(1e-8);
            }
        }
        if !free.is_empty() {
            let m = free.len();
            let sub = DMatrix::from_fn(m, m, |a, b| hess[(free[a], free[b])]);
            let eig = SymmetricEigen::new(sub);
            let largest = eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let floor = (largest * 1e-10).max(1e-12);
            let gf = DVector::from_iterator(m, free.iter().map(|&i| g[i]));
            let coeffs = eig.eigenvectors.transpose() * &gf;
            let scaled = DVector::from_iterator(
                m,
                coeffs
                    .iter()
                    .zip(eig.eigenvalues.iter())
                    .map(|(c, l)| -c / l.abs().max(floor)),
            );
            let step = &eig.eigenvectors * scaled;
            for (a, &i) in free.iter().enumerate() {
                d[i] = step[a];
            }
        }

        match line_search(problem, &x, &g, &d, ev.value) {
            Some((xn, _)) => {
                x = xn;
            }
            None => {
                // the Newton direction failed; try steepest ascent
                let scale = g.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
                let dg: Vec<f64> = g.iter().map(|v| -v / scale).collect();
                match line_search(problem, &x, &g, &dg, ev.value) {
                    Some((xn, _)) => x = xn,
                    None => {
                        note = "no further ascent possible at working precision";
                        break;
                    }
                }
            }
        }
        ev = problem.eval(&x);
    }
    let kkt = problem.kkt(&x, &ev.grad);
    StartResult {
        value: ev.value,
        kkt,
        iterations,
        collapsed: ev.collapsed,
        x,
        note,
    }
}

/// Armijo backtracking along the projection arc `P(x + a d)`, where `g` is
/// the gradient of the minimised function `-W`.
fn line_search(problem: &Problem, x: &[f64], g: &[f64], d: &[f64], value: f64) -> Option<(Vec<f64>, f64)> {
    let mut alpha = 1.0;
    for _ in 0..60 {
        let mut xa: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
        problem.project(&mut xa);
        let decrease: f64 = g.iter().zip(xa.iter().zip(x)).map(|(gi, (a, b))| gi * (a - b)).sum();
        if decrease < 0.0 {
            let va = problem.value(&xa);
            // -va <= -value + ARMIJO * decrease
            if va.is_finite() && va >= value - ARMIJO * decrease {
                return Some((xa, va));
            }
        } else if xa == x {
            return None;
        }
        alpha *= 0.5;
    }
    None
}

/// Models with the damage coefficient scaled down for the continuation
/// stages before the target model. Families without a coefficient are
/// solved directly.
fn continuation_models(model: &Model, stages: usize) -> Result<Vec<Model>, ModelError> {
    let a = match model.config.damage.coefficient() {
        Some(a) if a > 0.0 && stages > 1 => a,
        _ => return Ok(Vec::new()),
    };
    (1..stages)
        .map(|k| {
            let cfg = model.config.with_damage_coefficient(a * k as f64 / stages as f64)?;
            Model::new(cfg)
        })
        .collect()
}

/// The documented initial control paths.
fn initial_points(problem: &Problem) -> Vec<Vec<f64>> {
    let n = problem.model.periods();
    let s_t = problem.model.terminal_savings;
    let ramp = |periods: f64| -> Vec<f64> { (0..n).map(|t| (t as f64 / periods).min(1.0)).collect() };
    let paths: [(f64, Vec<f64>); STARTS] = [
        // steady-state savings, half the cap
        (s_t, vec![0.5; n]),
        // steady-state savings, full abatement
        (s_t, vec![1.0; n]),
        // low savings, no abatement
        (0.2, vec![0.0; n]),
        // high savings, abatement ramped up over 150 years
        (0.3, ramp(30.0)),
        // moderate savings, abatement ramped up over 75 years
        (0.22, ramp(15.0)),
    ];
    paths
        .into_iter()
        .map(|(s, mu_share)| {
            let mut x = vec![s; problem.free_s];
            x.extend((0..n).map(|t| mu_share[t] * problem.hi[problem.free_s + t]));
            x
        })
        .collect()
}

/// Solve `scenario` for `config`.
pub fn solve(config: &ModelConfig, scenario: &Scenario, settings: &SolverSettings) -> Result<SolveReport, ModelError> {
    let model = Model::new(config.clone())?;
    solve_model(&model, scenario, settings)
}

pub fn solve_model(model: &Model, scenario: &Scenario, settings: &SolverSettings) -> Result<SolveReport, ModelError> {
    let label = format!("{} {}", scenario.name(), settings);
    let baseline = match scenario {
        Scenario::FixedControls(controls) => {
            controls.validate(model)?;
            let fw = forward(model, &controls.s, &controls.mu, None);
            if !fw.objective.is_finite() {
                return Err(ModelError::NonFinite("objective"));
            }
            let objective = fw.objective;
            let collapsed = fw.flags.collapsed();
            let trajectory = trajectory_from(model, fw, &label);
            let (status, message) = if collapsed {
                (
                    SolveStatus::Infeasible,
                    floor_message(&trajectory.flags.capital_floor, &trajectory.flags.consumption_floor),
                )
            } else {
                (SolveStatus::Converged, "fixed controls simulated".to_string())
            };
            return Ok(SolveReport {
                scenario: scenario.name(),
                status,
                objective,
                iterations: 0,
                kkt_residual: 0.0,
                controls: controls.clone(),
                trajectory,
                message,
                start: 0,
            });
        }
        Scenario::Optimal => false,
        Scenario::Baseline => true,
    };

    let stage_models = continuation_models(model, settings.continuation)?;
    let stages: Vec<Problem> = stage_models
        .iter()
        .chain(std::iter::once(model))
        .map(|m| Problem::new(m, baseline))
        .collect();
    let problem = stages.last().expect("final stage");
    let points = initial_points(problem);
    let mut order: Vec<usize> = (0..STARTS).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(settings.seed));
    order.truncate(settings.starts.clamp(1, STARTS));

    let mut results: Vec<(usize, StartResult)> = Vec::new();
    let mut collapsed_run = 0;
    let mut infeasible = false;
    for &i in &order {
        let mut x = points[i].clone();
        let mut iterations = 0;
        let mut r = None;
        for stage in &stages {
            let res = run_start(stage, x, settings);
            iterations += res.iterations;
            x = res.x.clone();
            r = Some(res);
        }
        let r = StartResult {
            iterations,
            ..r.expect("at least one stage")
        };
        collapsed_run = if r.collapsed { collapsed_run + 1 } else { 0 };
        results.push((i, r));
        if collapsed_run >= INFEASIBLE_RUN {
            infeasible = true;
            break;
        }
    }
    if results.iter().all(|(_, r)| r.collapsed) {
        infeasible = true;
    }

    let converged = |r: &StartResult| r.kkt <= settings.tol && !r.collapsed;
    let better = |a: &&(usize, StartResult), b: &&(usize, StartResult)| a.1.value.total_cmp(&b.1.value);
    let best = results
        .iter()
        .filter(|(_, r)| converged(r))
        .max_by(better)
        .or_else(|| results.iter().filter(|(_, r)| !r.collapsed).max_by(better))
        .or_else(|| results.iter().max_by(better))
        .expect("at least one start");
    let (start, r) = (best.0, &best.1);
    let iterations = results.iter().map(|(_, r)| r.iterations).sum();

    let controls = problem.controls(&r.x);
    let fw = forward(model, &controls.s, &controls.mu, None);
    let trajectory = trajectory_from(model, fw, &label);
    let (status, message) = if converged(r) {
        (
            SolveStatus::Converged,
            format!("start {start}: {} after {} iterations", r.note, r.iterations),
        )
    } else if infeasible {
        let floors = floor_message(&trajectory.flags.capital_floor, &trajectory.flags.consumption_floor);
        (
            SolveStatus::Infeasible,
            format!(
                "infeasible: {} of {} starts ended on a state floor; best start {start}: {floors}; reduced gradient {:.3e}",
                results.iter().filter(|(_, r)| r.collapsed).count(),
                results.len(),
                r.kkt
            ),
        )
    } else {
        (
            SolveStatus::Stalled,
            format!(
                "stalled: best start {start}: {} after {} iterations, projected gradient {:.3e} above tolerance {:e}",
                r.note, r.iterations, r.kkt, settings.tol
            ),
        )
    };
    Ok(SolveReport {
        scenario: scenario.name(),
        status,
        objective: r.value,
        iterations,
        kkt_residual: r.kkt,
        controls,
        trajectory,
        message,
        start,
    })
}

fn floor_message(capital: &[usize], consumption: &[usize]) -> String {
    let list = |v: &[usize]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
        }
    };
    format!(
        "consumption floor active in periods [{}], capital floor in periods [{}]",
        list(consumption),
        list(capital)
    )
}
