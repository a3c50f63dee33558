//! Deterministic text serialisations of solver results: trajectory and
//! summary CSVs and a plain-text report.

use std::fmt::Write as _;

use crate::control::{summarize, SolveReport, SweepRow};

/// Significant digits of every float written to a data file.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Column order of the trajectory CSV, one per `PeriodRecord` field.
pub const TRAJECTORY_COLUMNS: [&str; 16] = [
    "year",
    "y_gross",
    "y_net",
    "y_final",
    "damage_frac",
    "lambda",
    "e_ind",
    "e_total",
    "mu",
    "s",
    "c_percap",
    "p_c",
    "k_over_y",
    "t_at",
    "k",
    "m_at",
];

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "a",
    "status",
    "objective",
    "peak_damage",
    "peak_damage_temp",
    "peak_temp",
    "min_k_over_y",
    "min_k_over_y_year",
    "min_c_percap_usd",
    "min_c_year",
    "recovery_year",
    "mean_savings_first_century",
    "message",
];

/// `v` rounded to nine significant digits, in plain decimal notation where
/// that stays short and in `e` notation otherwise. Trailing zeros are
/// dropped and negative zero prints as `0`.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let rounded: f64 = sci.parse().expect("round trip");
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{rounded:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

pub fn trajectory_csv(report: &SolveReport) -> String {
    let mut w = csv_writer();
    w.write_record(TRAJECTORY_COLUMNS).expect("in-memory writer");
    for r in &report.trajectory.records {
        let mut row = vec![r.year.to_string()];
        row.extend(
            [
                r.y_gross,
                r.y_net,
                r.y_final,
                r.damage_frac,
                r.lambda,
                r.e_ind,
                r.e_total,
                r.mu,
                r.s,
                r.c_percap,
                r.p_c,
                r.k_over_y,
                r.t_at,
                r.k,
                r.m_at,
            ]
            .map(fmt_float),
        );
        w.write_record(&row).expect("in-memory writer");
    }
    finish(w)
}

/// Mean savings rate over the first `years` years of a trajectory.
pub fn mean_savings(report: &SolveReport, years: i32) -> f64 {
    let recs = &report.trajectory.records;
    let Some(first) = recs.first() else {
        return f64::NAN;
    };
    let s: Vec<f64> = recs
        .iter()
        .filter(|r| r.year < first.year + years)
        .map(|r| r.s)
        .collect();
    s.iter().sum::<f64>() / s.len() as f64
}

/// One row per sweep value; failed runs keep their `a` and error message.
pub fn summary_csv(rows: &[SweepRow]) -> String {
    let mut w = csv_writer();
    w.write_record(SUMMARY_COLUMNS).expect("in-memory writer");
    for row in rows {
        let fields: Vec<String> = match &row.result {
            Ok(report) => {
                let s = summarize(row.a, report);
                vec![
                    fmt_float(s.a),
                    s.status.to_string(),
                    fmt_float(s.objective),
                    fmt_float(s.peak_damage),
                    fmt_float(s.peak_damage_temp),
                    fmt_float(s.peak_temp),
                    fmt_float(s.min_k_over_y),
                    s.min_k_over_y_year.to_string(),
                    fmt_float(s.min_c_percap),
                    s.min_c_year.to_string(),
                    s.recovery_year.map(|y| y.to_string()).unwrap_or_default(),
                    fmt_float(mean_savings(report, 100)),
                    report.message.clone(),
                ]
            }
            Err(e) => {
                let mut f = vec![fmt_float(row.a), "error".to_string()];
                f.extend(std::iter::repeat_n(String::new(), SUMMARY_COLUMNS.len() - 3));
                f.push(e.clone());
                f
            }
        };
        w.write_record(&fields).expect("in-memory writer");
    }
    finish(w)
}

/// Human-readable report of one solve.
/// `backstop_price` is the per-period backstop path (USD/tCO2) so the solved
/// carbon price can be read against it.
pub fn report_text(report: &SolveReport, a: Option<f64>, backstop_price: &[f64]) -> String {
    let mut out = String::new();
    let p = &report.trajectory.provenance;
    let _ = writeln!(out, "scenario: {}", report.scenario);
    if let Some(a) = a {
        let _ = writeln!(out, "damage_coefficient: {}", fmt_float(a));
    }
    let _ = writeln!(out, "status: {}", report.status);
    let _ = writeln!(out, "objective: {}", fmt_float(report.objective));
    let _ = writeln!(out, "iterations: {}", report.iterations);
    let _ = writeln!(out, "kkt_residual: {}", fmt_float(report.kkt_residual));
    let _ = writeln!(out, "start: {}", report.start);
    let _ = writeln!(out, "config_hash: {}", p.config_hash);
    let _ = writeln!(out, "settings: {}", p.settings);
    let flags = &report.trajectory.flags;
    let list = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "capital_floor_periods: {}", list(&flags.capital_floor));
    let _ = writeln!(out, "consumption_floor_periods: {}", list(&flags.consumption_floor));
    let _ = writeln!(out, "damage_clamped_periods: {}", list(&flags.damage_clamped));
    if !report.trajectory.records.is_empty() {
        let s = summarize(a.unwrap_or(f64::NAN), report);
        let _ = writeln!(out, "peak_damage: {}", fmt_float(s.peak_damage));
        let _ = writeln!(out, "peak_damage_temp: {}", fmt_float(s.peak_damage_temp));
        let _ = writeln!(out, "peak_temp: {}", fmt_float(s.peak_temp));
        let _ = writeln!(
            out,
            "min_k_over_y: {} ({})",
            fmt_float(s.min_k_over_y),
            s.min_k_over_y_year
        );
        let _ = writeln!(
            out,
            "min_c_percap_usd: {} ({})",
            fmt_float(s.min_c_percap),
            s.min_c_year
        );
        let recovery = s.recovery_year.map(|y| y.to_string()).unwrap_or_else(|| "none".into());
        let _ = writeln!(out, "recovery_year: {recovery}");
        let _ = writeln!(
            out,
            "mean_savings_first_century: {}",
            fmt_float(mean_savings(report, 100))
        );
        let records = &report.trajectory.records;
        let (t_max, max) = records
            .iter()
            .enumerate()
            .skip(1)
            .map(|(t, r)| (t, r.p_c))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if max.is_finite() {
            let _ = writeln!(out, "max_carbon_price: {} ({})", fmt_float(max), records[t_max].year);
            if let Some(&pb) = backstop_price.get(t_max) {
                let _ = writeln!(out, "backstop_price_at_max: {}", fmt_float(pb));
            }
        }
        if let Some(&pb) = backstop_price.first() {
            let _ = writeln!(out, "initial_backstop_price: {}", fmt_float(pb));
        }
    }
    let _ = writeln!(out, "message: {}", report.message);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(223.0), "223");
        assert_eq!(fmt_float(0.1), "0.1");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_float(-2.0 / 3.0), "-0.666666667");
        assert_eq!(fmt_float(123456.789012), "123456.789");
        assert_eq!(fmt_float(9.9999999996), "10");
        assert_eq!(fmt_float(1e-7), "1e-7");
        assert_eq!(fmt_float(-1.234567891e-9), "-1.23456789e-9");
        assert_eq!(fmt_float(6.02214076e23), "6.02214076e23");
        assert_eq!(fmt_float(0.000012345678912), "0.0000123456789");
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn formatted_values_round_trip_to_nine_digits() {
        for v in [std::f64::consts::PI, 1.0e14 / 7.0, -3.0e-5 / 7.0, 0.019_999_999_96] {
            let back: f64 = fmt_float(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 5e-9, "{v} -> {back}");
        }
    }
}
