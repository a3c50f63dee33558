use dice_core::control::{
    sensitivity_sweep, social_cost_of_carbon, social_cost_of_carbon_adjoint, solve_model, summarize, ControlPath,
    SccError, Scenario, SolveReport, SolveStatus, SolverSettings,
};
use dice_core::economy::{optimal_mitigation, Model};
use dice_core::ModelConfig;

fn model(a: f64) -> Model {
    Model::new(ModelConfig::default().with_damage_coefficient(a).unwrap()).unwrap()
}

fn optimal(m: &Model) -> SolveReport {
    let r = solve_model(m, &Scenario::Optimal, &SolverSettings::default()).unwrap();
    assert!(r.converged(), "{}", r.message);
    r
}

#[test]
fn no_damages_means_no_social_cost() {
    let m = model(0.0);
    let r = optimal(&m);
    for t in [1, 5, 20] {
        assert_eq!(social_cost_of_carbon(&m, &r, t, 1.0).unwrap(), 0.0);
    }
    assert!(social_cost_of_carbon_adjoint(&m, &r)
        .unwrap()
        .iter()
        .all(|v| v.abs() < 1e-9));
    // with nothing to gain from abatement the optimum does not abate
    assert!(r.controls.mu[1..].iter().all(|&mu| mu < 1e-6));
}

#[test]
fn social_cost_rises_with_the_damage_coefficient() {
    let mut last = 0.0;
    for a in [0.001, 0.00236, 0.005, 0.01] {
        let m = model(a);
        let r = optimal(&m);
        let scc = social_cost_of_carbon(&m, &r, 1, 1.0).unwrap();
        assert!(scc > last, "a={a}: {scc} <= {last}");
        last = scc;
    }
}

#[test]
fn social_cost_estimates_agree() {
    let m = model(0.00236);
    let r = optimal(&m);
    let adj = social_cost_of_carbon_adjoint(&m, &r).unwrap();
    for t in [1, 3, 10, 30] {
        let full = social_cost_of_carbon(&m, &r, t, 1.0).unwrap();
        let half = social_cost_of_carbon(&m, &r, t, 0.5).unwrap();
        assert!(((full - half) / full).abs() < 0.01, "t={t}: {full} vs {half}");
        assert!(
            ((full - adj[t]) / full).abs() < 0.01,
            "t={t}: {full} vs adjoint {}",
            adj[t]
        );
    }
    // where abatement is interior the optimal carbon price equals the SCC
    let rec = &r.trajectory.records[1];
    assert!(rec.mu > 0.0 && rec.mu < m.paths.mu_cap[1]);
    assert!(
        ((rec.p_c - adj[1]) / adj[1]).abs() < 0.02,
        "price {} scc {}",
        rec.p_c,
        adj[1]
    );
}

#[test]
fn social_cost_needs_a_converged_report() {
    let m = model(0.19236);
    let r = solve_model(&m, &Scenario::Optimal, &SolverSettings::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Infeasible);
    assert_eq!(
        social_cost_of_carbon(&m, &r, 1, 1.0),
        Err(SccError::NotConverged(SolveStatus::Infeasible))
    );
    let ok = optimal(&model(0.00236));
    let m = model(0.00236);
    assert!(matches!(
        social_cost_of_carbon(&m, &ok, 500, 1.0),
        Err(SccError::Period { .. })
    ));
    assert!(matches!(
        social_cost_of_carbon(&m, &ok, 1, 0.0),
        Err(SccError::Pulse(_))
    ));
}

#[test]
fn baseline_respects_the_price_cap() {
    let m = model(0.00236);
    let r = solve_model(&m, &Scenario::Baseline, &SolverSettings::default()).unwrap();
    assert!(r.converged(), "{}", r.message);
    let cfg = &m.config;
    for t in 1..m.periods() {
        let cap_price = cfg.carbon_price_cap.at(cfg.grid.elapsed(t));
        let bound = optimal_mitigation(cap_price, m.paths.backstop_price[t], cfg.theta2(), m.paths.mu_cap[t]);
        assert!(
            r.controls.mu[t] <= bound + 1e-12,
            "t={t}: {} > {bound}",
            r.controls.mu[t]
        );
    }
    let opt = optimal(&m);
    assert!(r.objective <= opt.objective + 1e-9);
}

#[test]
fn starting_order_does_not_change_the_optimum() {
    let m = model(0.00236);
    let base = optimal(&m);
    for seed in [1, 2, 3] {
        let settings = SolverSettings {
            seed,
            ..SolverSettings::default()
        };
        let r = solve_model(&m, &Scenario::Optimal, &settings).unwrap();
        assert!(r.converged());
        assert!(((r.objective - base.objective) / base.objective).abs() < 1e-9);
        let gap = r
            .controls
            .mu
            .iter()
            .zip(&base.controls.mu)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-3, "seed {seed}: controls differ by {gap}");
    }
}

#[test]
fn fixed_controls_are_simulated_not_optimised() {
    let m = model(0.00236);
    let n = m.periods();
    let mut c = ControlPath::constant(n, 0.22, 0.5);
    c.mu[0] = 0.03;
    let r = solve_model(&m, &Scenario::FixedControls(c.clone()), &SolverSettings::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert_eq!(r.controls, c);
    assert_eq!(r.iterations, 0);
    let bad = ControlPath::constant(n, 1.5, 0.5);
    assert!(solve_model(&m, &Scenario::FixedControls(bad), &SolverSettings::default()).is_err());
}

#[test]
fn sweep_rows_follow_the_damage_coefficient() {
    let values = [0.00236, 0.05, 0.1];
    let rows = sensitivity_sweep(
        &ModelConfig::default(),
        &values,
        &Scenario::Optimal,
        &SolverSettings::default(),
    )
    .unwrap();
    assert_eq!(rows.iter().map(|r| r.a).collect::<Vec<_>>(), values);
    let sums: Vec<_> = rows
        .iter()
        .map(|r| summarize(r.a, r.result.as_ref().unwrap()))
        .collect();
    assert!(sums.iter().all(|s| s.status == SolveStatus::Converged));
    for w in sums.windows(2) {
        assert!(w[1].peak_damage > w[0].peak_damage);
        assert!(w[1].objective < w[0].objective);
    }
    let cfg = ModelConfig::default();
    for bad in [-0.1, f64::NAN] {
        assert!(sensitivity_sweep(&cfg, &[bad], &Scenario::Optimal, &SolverSettings::default()).is_err());
    }
}
