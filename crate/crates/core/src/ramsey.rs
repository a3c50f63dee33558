//! The continuous-time Ramsey growth model in per-capita (or per effective
//! worker) units: steady state, local eigenstructure, saddle-path shooting
//! and the transversality diagnostic.
//!
//! Dynamics with population growth `n` and labour-augmenting growth `g`:
//!
//! ```text
//! k' = A k^gamma - (delta + n + g) k - c
//! c' = (c / alpha) (gamma A k^(gamma - 1) - delta - rho - alpha g)
//! ```
//!
//! The stationary case `n = g = 0` is the reference; nonzero growth rates are
//! supported but experimental.

use num_complex::Complex64;
use thiserror::Error;

/// Integration step, years.
pub const DEFAULT_STEP: f64 = 0.05;
/// Shooting horizon, years.
pub const DEFAULT_HORIZON: f64 = 300.0;
/// Relative distance from the steady state at which a path counts as captured.
pub const CAPTURE_TOLERANCE: f64 = 1e-6;
/// Threshold below which the transversality sequence counts as vanished.
pub const TRANSVERSALITY_TOLERANCE: f64 = 1e-8;
/// Growth of a consumption error after which a followed path is re-anchored.
const REANCHOR_GROWTH: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RamseyError {
    #[error("invalid Ramsey parameter {name} = {value}")]
    Parameter { name: &'static str, value: f64 },
    #[error("no positive steady state: gamma A k^(gamma-1) would have to equal {required}")]
    NoSteadyState { required: f64 },
    #[error("initial capital must be positive, got {0}")]
    InitialCapital(f64),
    #[error("could not bracket the saddle path: c0 in ({lo}, {hi}) classified as {lo_class:?} and {hi_class:?}")]
    Bracket {
        lo: f64,
        hi: f64,
        lo_class: Fate,
        hi_class: Fate,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyParams {
    /// Elasticity of marginal utility.
    pub alpha: f64,
    /// Pure rate of time preference, per year.
    pub rho: f64,
    /// Depreciation rate, per year.
    pub delta: f64,
    /// Capital share.
    pub gamma: f64,
    /// Total factor productivity.
    pub a: f64,
    /// Population growth rate, per year.
    pub n: f64,
    /// Labour-augmenting technology growth rate, per year.
    pub g: f64,
}

impl RamseyParams {
    pub fn stationary(alpha: f64, rho: f64, delta: f64, gamma: f64, a: f64) -> Self {
        RamseyParams {
            alpha,
            rho,
            delta,
            gamma,
            a,
            n: 0.0,
            g: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), RamseyError> {
        let checks = [
            ("alpha", self.alpha, self.alpha > 0.0),
            ("rho", self.rho, self.rho >= 0.0),
            ("delta", self.delta, self.delta >= 0.0),
            ("gamma", self.gamma, self.gamma > 0.0 && self.gamma < 1.0),
            ("a", self.a, self.a > 0.0),
            ("n", self.n, self.n.is_finite()),
            ("g", self.g, self.g.is_finite()),
        ];
        for (name, value, ok) in checks {
            if !(ok && value.is_finite()) {
                return Err(RamseyError::Parameter { name, value });
            }
        }
        Ok(())
    }

    pub fn output(&self, k: f64) -> f64 {
        self.a * k.powf(self.gamma)
    }

    pub fn marginal_product(&self, k: f64) -> f64 {
        self.gamma * self.a * k.powf(self.gamma - 1.0)
    }

    fn marginal_product_slope(&self, k: f64) -> f64 {
        self.gamma * (self.gamma - 1.0) * self.a * k.powf(self.gamma - 2.0)
    }

    /// Effective depreciation of capital per worker.
    fn dilution(&self) -> f64 {
        self.delta + self.n + self.g
    }

    /// Required return on capital in the steady state.
    fn required_return(&self) -> f64 {
        self.delta + self.rho + self.alpha * self.g
    }

    /// `(c', k')` at `(c, k)`.
    pub fn rhs(&self, c: f64, k: f64) -> (f64, f64) {
        let dc = c / self.alpha * (self.marginal_product(k) - self.required_return());
        let dk = self.output(k) - self.dilution() * k - c;
        (dc, dk)
    }

    /// Analytic Jacobian of `(c', k')` with respect to `(c, k)`.
    pub fn jacobian(&self, c: f64, k: f64) -> [[f64; 2]; 2] {
        [
            [
                (self.marginal_product(k) - self.required_return()) / self.alpha,
                c / self.alpha * self.marginal_product_slope(k),
            ],
            [-1.0, self.marginal_product(k) - self.dilution()],
        ]
    }

    /// Consumption on the `k' = 0` nullcline.
    pub fn k_nullcline(&self, k: f64) -> f64 {
        self.output(k) - self.dilution() * k
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub k_star: f64,
    pub c_star: f64,
    /// Jacobian eigenvalues at the steady state, sorted by real part.
    pub eigenvalues: [Complex64; 2],
}

pub fn steady_state(params: &RamseyParams) -> Result<SteadyState, RamseyError> {
    params.validate()?;
    let required = params.required_return();
    if required <= 0.0 {
        return Err(RamseyError::NoSteadyState { required });
    }
    let k_star = (params.gamma * params.a / required).powf(1.0 / (1.0 - params.gamma));
    let c_star = params.k_nullcline(k_star);
    if !(k_star.is_finite() && k_star > 0.0 && c_star > 0.0) {
        return Err(RamseyError::NoSteadyState { required });
    }
    let eigenvalues = eigenvalues(params.jacobian(c_star, k_star));
    Ok(SteadyState {
        k_star,
        c_star,
        eigenvalues,
    })
}

/// Savings rate that holds capital per effective worker at its steady state,
/// `gamma (delta + g) / (delta + rho + alpha g)`.
pub fn steady_state_savings_rate(gamma: f64, delta: f64, rho: f64, alpha: f64, growth: f64) -> f64 {
    gamma * (delta + growth) / (delta + rho + alpha * growth)
}

fn eigenvalues(j: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let root = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let half = Complex64::new(tr / 2.0, 0.0);
    let mut ev = [half - root, half + root];
    ev.sort_by(|a, b| a.re.total_cmp(&b.re));
    ev
}

/// Eigenvalues of the Jacobian at `at`, sorted by real part.
pub fn jacobian_eigenvalues(at: &SteadyState, params: &RamseyParams) -> [Complex64; 2] {
    eigenvalues(params.jacobian(at.c_star, at.k_star))
}

/// How a forward integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    /// Came within the capture tolerance of the steady state.
    Captured,
    /// Consumption too high: capital heads to zero.
    TooHigh,
    /// Consumption too low: consumption heads to zero while capital overshoots.
    TooLow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamseyPath {
    pub t: Vec<f64>,
    pub c: Vec<f64>,
    pub k: Vec<f64>,
    /// Time at which the path was handed to the linearised stable manifold.
    pub captured_at: Option<f64>,
    /// Whether the integration stopped early because capital reached zero.
    pub crashed: bool,
}

impl RamseyPath {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

fn rk4(params: &RamseyParams, c: f64, k: f64, h: f64) -> (f64, f64) {
    let (a1, b1) = params.rhs(c, k);
    let (a2, b2) = params.rhs(c + 0.5 * h * a1, k + 0.5 * h * b1);
    let (a3, b3) = params.rhs(c + 0.5 * h * a2, k + 0.5 * h * b2);
    let (a4, b4) = params.rhs(c + h * a3, k + h * b3);
    (
        c + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        k + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
    )
}

/// Plain forward integration from `(c0, k0)` for `horizon` years. Stops
/// early if capital or consumption leaves the positive quadrant.
pub fn integrate(params: &RamseyParams, c0: f64, k0: f64, horizon: f64, h: f64) -> RamseyPath {
    let steps = (horizon / h).round() as usize;
    let mut path = RamseyPath {
        t: vec![0.0],
        c: vec![c0],
        k: vec![k0],
        captured_at: None,
        crashed: false,
    };
    let (mut c, mut k) = (c0, k0);
    for i in 1..=steps {
        let (nc, nk) = rk4(params, c, k, h);
        if !(nk > 0.0 && nc > 0.0 && nk.is_finite() && nc.is_finite()) {
            path.crashed = true;
            break;
        }
        c = nc;
        k = nk;
        path.t.push(i as f64 * h);
        path.c.push(c);
        path.k.push(k);
    }
    path
}

fn relative_distance(ss: &SteadyState, c: f64, k: f64) -> f64 {
    ((c - ss.c_star) / ss.c_star)
        .abs()
        .max(((k - ss.k_star) / ss.k_star).abs())
}

/// Integrate from `(c0, k0)` until the path is captured or reveals which
/// side of the saddle path it started on.
fn classify(params: &RamseyParams, ss: &SteadyState, c0: f64, k0: f64, horizon: f64, h: f64) -> (Fate, usize) {
    let steps = (horizon / h).round() as usize;
    let below = k0 < ss.k_star;
    let (mut c, mut k) = (c0, k0);
    for i in 0..steps {
        if relative_distance(ss, c, k) < CAPTURE_TOLERANCE {
            return (Fate::Captured, i);
        }
        let (_, dk) = params.rhs(c, k);
        if k0 != ss.k_star {
            if below {
                if dk < 0.0 {
                    return (Fate::TooHigh, i);
                }
                if k > ss.k_star {
                    return (Fate::TooLow, i);
                }
            } else {
                if dk > 0.0 {
                    return (Fate::TooLow, i);
                }
                if k < ss.k_star {
                    return (Fate::TooHigh, i);
                }
            }
        } else if c > ss.c_star {
            return (Fate::TooHigh, i);
        } else if c < ss.c_star {
            return (Fate::TooLow, i);
        }
        let (nc, nk) = rk4(params, c, k, h);
        if !(nk > 0.0 && nk.is_finite()) {
            return (Fate::TooHigh, i);
        }
        if !(nc > 0.0 && nc.is_finite()) {
            return (Fate::TooLow, i);
        }
        c = nc;
        k = nk;
    }
    if relative_distance(ss, c, k) < CAPTURE_TOLERANCE {
        return (Fate::Captured, steps);
    }
    // undecided at the horizon: fall back on the unstable-mode projection
    (unstable_side(params, ss, c, k), steps)
}

fn unstable_side(params: &RamseyParams, ss: &SteadyState, c: f64, k: f64) -> Fate {
    let j = params.jacobian(ss.c_star, ss.k_star);
    let lam = ss.eigenvalues[1].re;
    // left eigenvector w with w J = lam w, normalised so that w_c = 1
    let w_k = (lam - j[0][0]) / j[1][0];
    let p = (c - ss.c_star) + w_k * (k - ss.k_star);
    // p vanishes on the stable manifold and grows with excess consumption
    if p > 0.0 {
        Fate::TooHigh
    } else {
        Fate::TooLow
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePath {
    pub c0: f64,
    pub path: RamseyPath,
    pub steady_state: SteadyState,
    /// Widths of the bisection bracket, one entry per iteration.
    pub bracket_widths: Vec<f64>,
}

/// Find the initial consumption that puts `k0` on the stable manifold by
/// bisection, then return the path with `c0` over `horizon` years.
///
/// Once the path comes within [`CAPTURE_TOLERANCE`] of the steady state its
/// remainder follows the linearised stable manifold, since roundoff in `c0`
/// would otherwise be amplified by the unstable eigenvalue.
pub fn saddle_path(params: &RamseyParams, k0: f64, horizon: f64) -> Result<SaddlePath, RamseyError> {
    saddle_path_with(params, k0, horizon, DEFAULT_STEP, 1e-15)
}

/// [`saddle_path`] with an explicit integration step and relative bracket
/// tolerance on `c0`.
pub fn saddle_path_with(
    params: &RamseyParams,
    k0: f64,
    horizon: f64,
    h: f64,
    c_tol: f64,
) -> Result<SaddlePath, RamseyError> {
    let ss = steady_state(params)?;
    if !(k0 > 0.0 && k0.is_finite()) {
        return Err(RamseyError::InitialCapital(k0));
    }
    let (c0, bracket_widths) = shoot(params, &ss, k0, horizon, h, c_tol)?;
    let path = follow(params, &ss, c0, k0, horizon, h, c_tol);
    Ok(SaddlePath {
        c0,
        path,
        steady_state: ss,
        bracket_widths,
    })
}

/// Bisect on initial consumption at `k0` until the path is captured or the
/// bracket is narrower than `c_tol` relative.
fn shoot(
    params: &RamseyParams,
    ss: &SteadyState,
    k0: f64,
    horizon: f64,
    h: f64,
    c_tol: f64,
) -> Result<(f64, Vec<f64>), RamseyError> {
    let mut lo = 0.0;
    let mut hi = params.output(k0);
    let mut bracket_widths = Vec::new();
    let mut best = None;
    if relative_distance(ss, ss.c_star, k0) < CAPTURE_TOLERANCE {
        best = Some(ss.c_star);
    } else {
        let mut hi_fate = classify(params, ss, hi, k0, horizon, h).0;
        let mut widenings = 0;
        while hi_fate == Fate::TooLow && widenings < 60 {
            lo = hi;
            hi *= 2.0;
            hi_fate = classify(params, ss, hi, k0, horizon, h).0;
            widenings += 1;
        }
        if hi_fate == Fate::TooLow {
            return Err(RamseyError::Bracket {
                lo,
                hi,
                lo_class: Fate::TooLow,
                hi_class: hi_fate,
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match classify(params, ss, mid, k0, horizon, h).0 {
                Fate::Captured => {
                    best = Some(mid);
                    break;
                }
                Fate::TooHigh => hi = mid,
                Fate::TooLow => lo = mid,
            }
            bracket_widths.push(hi - lo);
            if hi - lo <= c_tol * hi {
                break;
            }
        }
    }
    Ok((best.unwrap_or(0.5 * (lo + hi)), bracket_widths))
}

/// Integrate the chosen path, switching to the linear stable manifold once
/// it is captured or once it starts to peel away from the steady state.
///
/// Errors in `c` grow at the unstable rate, so when the approach is slow the
/// path is re-anchored on the saddle by shooting again from the current
/// capital after each interval over which errors grow by [`REANCHOR_GROWTH`].
fn follow(params: &RamseyParams, ss: &SteadyState, c0: f64, k0: f64, horizon: f64, h: f64, c_tol: f64) -> RamseyPath {
    let steps = (horizon / h).round() as usize;
    let lam = ss.eigenvalues[0].re;
    let reanchor_every = ((REANCHOR_GROWTH.ln() / ss.eigenvalues[1].re) / h).ceil().max(1.0) as usize;
    let j = params.jacobian(ss.c_star, ss.k_star);
    // stable eigenvector (v_c, v_k) from the second row: -v_c + j11 v_k = lam v_k
    let v_k = 1.0;
    let v_c = (j[1][1] - lam) * v_k;
    let mut path = RamseyPath {
        t: Vec::with_capacity(steps + 1),
        c: Vec::with_capacity(steps + 1),
        k: Vec::with_capacity(steps + 1),
        captured_at: None,
        crashed: false,
    };
    let (mut c, mut k) = (c0, k0);
    let mut closest = f64::INFINITY;
    let mut tail: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let t = i as f64 * h;
        if let Some((t_cap, amp)) = tail {
            let decay = amp * (lam * (t - t_cap)).exp();
            c = ss.c_star + decay * v_c;
            k = ss.k_star + decay * v_k;
        } else {
            let dist = relative_distance(ss, c, k);
            // a path that stops approaching has been captured as well as
            // floating point allows
            if dist < CAPTURE_TOLERANCE || (dist > closest && closest < 1e-3) {
                let amp = k - ss.k_star;
                tail = Some((t, amp));
                path.captured_at = Some(t);
                c = ss.c_star + amp * v_c;
            }
            closest = closest.min(dist);
        }
        path.t.push(t);
        path.c.push(c);
        path.k.push(k);
        if tail.is_none() && i < steps {
            if i > 0 && i % reanchor_every == 0 {
                if let Ok((c_new, _)) = shoot(params, ss, k, horizon, h, c_tol) {
                    c = c_new;
                }
            }
            let (nc, nk) = rk4(params, c, k, h);
            if !(nk > 0.0 && nc > 0.0 && nk.is_finite() && nc.is_finite()) {
                path.crashed = true;
                break;
            }
            c = nc;
            k = nk;
        }
    }
    path
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransversalityOutcome {
    /// Decreasing and below tolerance at the end of the path.
    Vanishes,
    /// Growing at the end of the path.
    Explodes,
    /// Neither: still decreasing but above tolerance, or the path crashed.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalityReport {
    /// `c(t)^(-alpha) k(t) e^(-rho t)` along the path.
    pub values: Vec<f64>,
    pub outcome: TransversalityOutcome,
}

pub fn transversality_diagnostic(path: &RamseyPath, params: &RamseyParams) -> TransversalityReport {
    let values: Vec<f64> = path
        .t
        .iter()
        .zip(path.c.iter().zip(&path.k))
        .map(|(&t, (&c, &k))| c.powf(-params.alpha) * k * (-params.rho * t).exp())
        .collect();
    let n = values.len();
    let outcome = if path.crashed || n < 2 {
        TransversalityOutcome::Inconclusive
    } else {
        let last = values[n - 1];
        let prev = values[n - 2];
        if last > prev && last > values[0] {
            TransversalityOutcome::Explodes
        } else if last < TRANSVERSALITY_TOLERANCE && last <= prev {
            TransversalityOutcome::Vanishes
        } else if !last.is_finite() {
            TransversalityOutcome::Explodes
        } else {
            TransversalityOutcome::Inconclusive
        }
    };
    TransversalityReport { values, outcome }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RamseyParams {
        RamseyParams::stationary(1.5, 0.03, 0.07, 0.3, 1.0)
    }

    #[test]
    fn closed_form_steady_state() {
        let ss = steady_state(&base()).unwrap();
        assert!((ss.k_star - 3f64.powf(1.0 / 0.7)).abs() < 1e-12);
        assert!((ss.k_star - 4.80399).abs() < 1e-5);
        assert!((ss.c_star - (ss.k_star.powf(0.3) - 0.07 * ss.k_star)).abs() < 1e-12);
        let (dc, dk) = base().rhs(ss.c_star, ss.k_star);
        assert!(dc.abs() < 1e-10 && dk.abs() < 1e-10);
    }

    #[test]
    fn capital_scales_with_productivity() {
        let p = RamseyParams::stationary(1.0, 0.04, 0.06, 0.5, 1.0);
        let k1 = steady_state(&p).unwrap().k_star;
        let k2 = steady_state(&RamseyParams { a: 2.0, ..p }).unwrap().k_star;
        assert!((k2 / k1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn no_steady_state_without_a_required_return() {
        let p = RamseyParams::stationary(1.0, 0.0, 0.0, 0.3, 1.0);
        assert!(matches!(steady_state(&p), Err(RamseyError::NoSteadyState { .. })));
        assert!(steady_state(&RamseyParams { gamma: 1.2, ..base() }).is_err());
    }

    #[test]
    fn saddle_eigenvalues() {
        let p = base();
        let ss = steady_state(&p).unwrap();
        let [l1, l2] = jacobian_eigenvalues(&ss, &p);
        assert!(l2.re > 0.0);
        assert!((l1 * l2).re < 0.0);
        assert!(l1.im == 0.0 && l2.im == 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = base();
        let (c, k) = (0.9, 3.0);
        let j = p.jacobian(c, k);
        let h = 1e-6;
        for (col, (dc, dk)) in [(h, 0.0), (0.0, h)].into_iter().enumerate() {
            let (fp0, fp1) = p.rhs(c + dc, k + dk);
            let (fm0, fm1) = p.rhs(c - dc, k - dk);
            let fd = [(fp0 - fm0) / (2.0 * h), (fp1 - fm1) / (2.0 * h)];
            for row in 0..2 {
                let a = j[row][col];
                assert!((fd[row] - a).abs() <= 1e-5 * a.abs().max(1e-3), "J[{row}][{col}]");
            }
        }
    }

    #[test]
    fn starting_at_the_steady_state_stays_there() {
        let p = base();
        let ss = steady_state(&p).unwrap();
        let sp = saddle_path(&p, ss.k_star, 50.0).unwrap();
        assert_eq!(sp.c0, ss.c_star);
        assert!(sp.path.k.iter().all(|&k| (k - ss.k_star).abs() < 1e-9));
        assert!(sp.path.c.iter().all(|&c| (c - ss.c_star).abs() < 1e-9));
    }

    #[test]
    fn steady_state_diagnostic_decays_exponentially() {
        let p = base();
        let ss = steady_state(&p).unwrap();
        let path = integrate(&p, ss.c_star, ss.k_star, 10.0, 0.5);
        let rep = transversality_diagnostic(&path, &p);
        for (t, v) in path.t.iter().zip(&rep.values) {
            let expected = ss.c_star.powf(-p.alpha) * ss.k_star * (-p.rho * t).exp();
            assert!((v - expected).abs() <= 1e-9 * expected);
        }
    }

    #[test]
    fn savings_rate_at_the_reference_calibration() {
        let s = steady_state_savings_rate(0.3, 0.1, 0.015, 1.45, 0.004);
        assert!((s - 0.0312 / 0.1208).abs() < 1e-12);
        // stationary consistency with the steady state
        let p = base();
        let ss = steady_state(&p).unwrap();
        let s0 = steady_state_savings_rate(p.gamma, p.delta, p.rho, p.alpha, 0.0);
        assert!((s0 - p.delta * ss.k_star / p.output(ss.k_star)).abs() < 1e-12);
    }
}
