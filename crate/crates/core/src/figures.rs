//! The standard figures: estimate points, the damage-function genealogy, the
//! state regression, the Ramsey phase portrait and sweep overlays.

use crate::config::ModelConfig;
use crate::control::SolveReport;
use crate::damage::{estimate_points, nordhaus_genealogy, DamageSpec};
use crate::output::fmt_float;
use crate::plot::{Chart, Dash, Series, PALETTE};
use crate::ramsey::{integrate, saddle_path, steady_state, RamseyError, RamseyParams, DEFAULT_STEP};
use crate::regression::{fit, load_states, FitVariant, RegressionError};

/// Damage coefficient of the curve drawn over the estimate points.
pub const ESTIMATE_CURVE_A: f64 = 0.00227;
/// Largest warming for which the quadratic damage curve is drawn, degrees C.
pub const CURVE_MAX_WARMING: f64 = 6.0;

fn provenance(config: &ModelConfig, what: &str) -> Vec<String> {
    vec![what.to_string(), format!("config-hash {}", config.hash())]
}

fn curve(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    (0..=n)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            (x, f(x))
        })
        .collect()
}

fn damage_pct(spec: &DamageSpec, dt: f64) -> f64 {
    100.0 * spec.eval_with_derivative(dt).0
}

/// Estimate points with the quadratic damage curve, impacts in percent of GDP.
pub fn estimates_figure(config: &ModelConfig) -> String {
    let mut ch = Chart::new(
        "Estimates of the total impact of warming",
        "Warming above pre-industrial (deg C)",
        "Change in global income (% of GDP)",
    );
    ch.comments = provenance(config, "estimate points and quadratic damage curve");
    let pts = estimate_points();
    ch.push(Series::dots(
        "point estimates",
        pts.iter().map(|p| p.as_pair()).collect(),
        PALETTE[0],
    ));
    let spec = DamageSpec::quadratic(ESTIMATE_CURVE_A);
    ch.push(Series::line(
        format!("quadratic damage, a = {}", fmt_float(ESTIMATE_CURVE_A)),
        curve(|t| -damage_pct(&spec, t), 0.0, CURVE_MAX_WARMING, 120),
        Dash::Solid,
        PALETTE[1],
    ));
    ch.x_range = Some((0.0, CURVE_MAX_WARMING));
    ch.render()
}

/// Damage fraction of each published vintage on `[0, 6]` degrees C.
pub fn genealogy_figure(config: &ModelConfig) -> String {
    let mut ch = Chart::new(
        "Revisions of the DICE damage function",
        "Warming above pre-industrial (deg C)",
        "Damages (% of gross output)",
    );
    ch.comments = provenance(config, "published damage specifications by vintage");
    for (i, (year, spec)) in nordhaus_genealogy().into_iter().enumerate() {
        ch.push(Series::line(
            year.to_string(),
            curve(|t| damage_pct(&spec, t), 0.0, CURVE_MAX_WARMING, 120),
            Dash::nth(i / PALETTE.len()),
            PALETTE[i % PALETTE.len()],
        ));
    }
    ch.x_range = Some((0.0, CURVE_MAX_WARMING));
    ch.render()
}

/// State temperature deviations against income deviations with the
/// quadratic fit of `variant`, drawn only where `|dT| <= 6`.
pub fn regression_figure(config: &ModelConfig, variant: FitVariant) -> Result<String, RegressionError> {
    let states = load_states()?;
    let f = fit(&states, variant)?;
    let mut ch = Chart::new(
        "State temperature and GSP per capita",
        "Deviation from national mean temperature (deg C)",
        "Deviation from national GSP per capita (%)",
    );
    let mut comments = provenance(config, "state data and quadratic fit");
    comments.push(format!(
        "variant {variant} beta {} r2 {}",
        fmt_float(f.beta),
        fmt_float(f.r_squared)
    ));
    ch.comments = comments;
    ch.push(Series::dots(
        "states",
        states
            .iter()
            .map(|r| (r.dtemp, 100.0 * r.dgsp_percap / f.national_mean))
            .collect(),
        PALETTE[0],
    ));
    ch.push(Series::line(
        format!("fit: {}% per deg C squared", fmt_float(100.0 * f.beta)),
        curve(|t| 100.0 * f.predict(t), -CURVE_MAX_WARMING, CURVE_MAX_WARMING, 120),
        Dash::Solid,
        PALETTE[1],
    ));
    Ok(ch.render())
}

/// Phase portrait in the `(k, c)` plane: both nullclines, the saddle path
/// from either side of the steady state and paths that start off it.
pub fn phase_portrait(params: &RamseyParams, comments: Vec<String>) -> Result<String, RamseyError> {
    let ss = steady_state(params)?;
    let k_max = 2.5 * ss.k_star;
    let c_max = 2.0 * params.k_nullcline(ss.k_star).max(ss.c_star);
    let inside = |c: f64, k: f64| (0.0..=k_max).contains(&k) && (0.0..=c_max).contains(&c);
    let clip = |cs: &[f64], ks: &[f64]| -> Vec<(f64, f64)> {
        ks.iter()
            .zip(cs)
            .map(|(&k, &c)| (k, c))
            .take_while(|&(k, c)| inside(c, k))
            .step_by(4)
            .collect()
    };

    let mut ch = Chart::new(
        "Ramsey model phase portrait",
        "Capital per effective worker k",
        "Consumption c",
    );
    ch.comments = comments;
    ch.comments
        .push(format!("k* {} c* {}", fmt_float(ss.k_star), fmt_float(ss.c_star)));
    ch.x_range = Some((0.0, k_max));
    ch.y_range = Some((0.0, c_max));
    ch.push(Series::line(
        "dk/dt = 0",
        curve(|k| params.k_nullcline(k), 0.0, k_max, 200),
        Dash::Dashed,
        PALETTE[5],
    ));
    ch.push(Series::line(
        "dc/dt = 0",
        vec![(ss.k_star, 0.0), (ss.k_star, c_max)],
        Dash::Dotted,
        PALETTE[5],
    ));
    for (i, k0) in [0.2 * ss.k_star, 2.2 * ss.k_star].into_iter().enumerate() {
        let sp = saddle_path(params, k0, 200.0)?;
        let label = if i == 0 {
            "saddle path, k0 < k*"
        } else {
            "saddle path, k0 > k*"
        };
        ch.push(Series::line(
            label,
            clip(&sp.path.c, &sp.path.k),
            Dash::Solid,
            PALETTE[0],
        ));
        for (j, factor) in [0.9, 1.1].into_iter().enumerate() {
            let p = integrate(params, sp.c0 * factor, k0, 200.0, DEFAULT_STEP);
            ch.push(Series::line(
                format!("c0 x {} from k0 = {}", fmt_float(factor), fmt_float(k0)),
                clip(&p.c, &p.k),
                Dash::Solid,
                PALETTE[1 + j],
            ));
        }
    }
    Ok(ch.render())
}

/// One solved run of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRun<'a> {
    pub a: f64,
    pub report: &'a SolveReport,
}

type Field = fn(&crate::economy::PeriodRecord) -> f64;

fn sweep_chart(
    runs: &[SweepRun<'_>],
    config: &ModelConfig,
    title: &str,
    y_label: &str,
    y2_label: &str,
    fields: &[(&str, Field, bool)],
) -> String {
    let mut ch = Chart::new(title, "Year", y_label);
    ch.y2_label = y2_label.to_string();
    ch.comments = provenance(config, title);
    for run in runs {
        let p = &run.report.trajectory.provenance;
        ch.comments.push(format!(
            "a {} status {} run-config-hash {} settings {}",
            fmt_float(run.a),
            run.report.status,
            p.config_hash,
            p.settings
        ));
    }
    for (fi, &(name, get, right)) in fields.iter().enumerate() {
        for (ri, run) in runs.iter().enumerate() {
            let pts = run
                .report
                .trajectory
                .records
                .iter()
                .map(|r| (r.year as f64, get(r)))
                .collect();
            let s = Series::line(
                format!("{name}, a = {}", fmt_float(run.a)),
                pts,
                Dash::nth(ri),
                PALETTE[fi % PALETTE.len()],
            );
            ch.push(if right { s.on_right() } else { s });
        }
    }
    ch.render()
}

/// Gross and final output (left) and damages as a share of gross output (right).
pub fn output_figure(runs: &[SweepRun<'_>], config: &ModelConfig) -> String {
    sweep_chart(
        runs,
        config,
        "Output and damages",
        "Output (trillion USD2005 per year)",
        "Damages (share of gross output)",
        &[
            ("gross output", |r| r.y_gross, false),
            ("final output", |r| r.y_final, false),
            ("damages", |r| r.damage_frac, true),
        ],
    )
}

/// Emissions-reduction and savings rates (left) and abatement cost as a share
/// of output net of damages (right).
pub fn rates_figure(runs: &[SweepRun<'_>], config: &ModelConfig) -> String {
    sweep_chart(
        runs,
        config,
        "Emissions reduction, savings and abatement cost",
        "Rate",
        "Abatement cost (share of net output)",
        &[
            ("emissions reduction", |r| r.mu, false),
            ("savings", |r| r.s, false),
            ("abatement cost", |r| r.lambda, true),
        ],
    )
}

/// Capital-to-output ratio (left), consumption per capita and carbon price (right).
pub fn capital_figure(runs: &[SweepRun<'_>], config: &ModelConfig) -> String {
    sweep_chart(
        runs,
        config,
        "Capital, consumption and carbon price",
        "Capital-to-output ratio (years)",
        "Consumption (thousand USD2005 per year) and carbon price (USD2005 per t)",
        &[
            ("capital-to-output", |r| r.k_over_y, false),
            ("consumption per capita", |r| r.c_percap, true),
            ("carbon price", |r| r.p_c, true),
        ],
    )
}
