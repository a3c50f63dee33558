//! `dice`: batch front end for the dice-core engine.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dice_core::config::ConfigError;
use dice_core::control::{sensitivity_sweep, solve, Scenario, SolveReport, SolveStatus, SolverSettings};
use dice_core::economy::Model;
use dice_core::figures::{self, SweepRun};
use dice_core::output::{fmt_float, report_text, summary_csv, trajectory_csv};
use dice_core::ramsey::{
    jacobian_eigenvalues, saddle_path, steady_state, transversality_diagnostic, RamseyParams, DEFAULT_HORIZON,
};
use dice_core::regression::{compare_to_dice, fit, load_states, FitVariant, Weighting};
use dice_core::{load_config, ModelConfig};

use manifest::Manifest;

const EXIT_CODES: &str = "Exit codes:
  0  success (for sweep: at least one run converged)
  1  usage or input error
  2  infeasible: the solver ended on a collapsed trajectory
  3  stalled: no convergence within the iteration limit";

#[derive(Debug, Parser)]
#[command(name = "dice", version, about = "Climate-economy integrated assessment runs", after_help = EXIT_CODES)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "DICE_OUT_DIR", default_value = "dice-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one scenario and write its trajectory and report.
    Solve {
        /// Scenario file (TOML, overlaid on the built-in defaults).
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = ScenarioArg::Optimal)]
        scenario: ScenarioArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Solve once per damage coefficient and write a summary and overlay figures.
    Sweep {
        /// Scenario file (TOML, overlaid on the built-in defaults).
        config: PathBuf,
        /// Comma-separated damage coefficients.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        a_values: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ScenarioArg::Optimal)]
        scenario: ScenarioArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write figures drawn from the embedded datasets.
    Figures {
        /// Figure to write.
        #[arg(long, value_enum, default_value_t = FigureArg::All)]
        which: FigureArg,
        /// Scenario file whose hash is recorded in the figures.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Steady state, saddle path and phase portrait of the Ramsey model.
    Ramsey {
        /// Scenario file supplying alpha, rho, delta and gamma.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Initial capital as a multiple of the steady state.
        #[arg(long, default_value_t = 0.5)]
        k0_ratio: f64,
        /// Total factor productivity.
        #[arg(long, default_value_t = 1.0)]
        tfp: f64,
        /// Integration horizon, years.
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: f64,
    },
    /// Fit state GSP per capita against temperature deviations.
    Regress {
        /// Fit variant; defaults to the one pinned in the configuration.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        /// Scenario file supplying the pinned variant.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Seed permuting the order of the solver's starting points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the number of periods.
    #[arg(long)]
    periods: Option<usize>,
    /// Override the period length, years.
    #[arg(long)]
    step_years: Option<u32>,
    /// Projected-gradient tolerance.
    #[arg(long, default_value_t = 1e-6)]
    solver_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Optimal,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
    Phase,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    UnweightedIntercept,
    UnweightedOrigin,
    PopulationIntercept,
    PopulationOrigin,
}

impl From<VariantArg> for FitVariant {
    fn from(v: VariantArg) -> Self {
        let (weighting, intercept) = match v {
            VariantArg::UnweightedIntercept => (Weighting::Unweighted, true),
            VariantArg::UnweightedOrigin => (Weighting::Unweighted, false),
            VariantArg::PopulationIntercept => (Weighting::Population, true),
            VariantArg::PopulationOrigin => (Weighting::Population, false),
        };
        FitVariant { weighting, intercept }
    }
}

/// A failed command: exit code and diagnostic.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        usage(format!("configuration: {e}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        usage(format!("i/o: {e}"))
    }
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Converged => 0,
        SolveStatus::Infeasible => 2,
        SolveStatus::Stalled => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("dice: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    fs::create_dir_all(&cli.out)?;
    match cli.command {
        Command::Solve { config, scenario, run } => cmd_solve(&cli.out, &config, scenario, &run),
        Command::Sweep {
            config,
            a_values,
            scenario,
            run,
        } => cmd_sweep(&cli.out, &config, &a_values, scenario, &run),
        Command::Figures { which, config } => cmd_figures(&cli.out, which, config.as_deref()),
        Command::Ramsey {
            config,
            k0_ratio,
            tfp,
            horizon,
        } => cmd_ramsey(&cli.out, config.as_deref(), k0_ratio, tfp, horizon),
        Command::Regress { variant, config } => cmd_regress(&cli.out, variant, config.as_deref()),
    }
}

fn read_config(path: Option<&Path>) -> Result<ModelConfig, Failure> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(ModelConfig::default()),
    }
}

fn run_config(path: &Path, run: &RunArgs) -> Result<(ModelConfig, SolverSettings), Failure> {
    let mut cfg = load_config(path)?;
    if let Some(p) = run.periods {
        cfg.grid.periods = p;
    }
    if let Some(s) = run.step_years {
        cfg.grid.step_years = s;
    }
    cfg.validate()?;
    if !(run.solver_tol.is_finite() && run.solver_tol > 0.0) {
        return Err(usage("--solver-tol must be a positive number"));
    }
    let settings = SolverSettings {
        tol: run.solver_tol,
        seed: run.seed,
        ..SolverSettings::default()
    };
    Ok((cfg, settings))
}

fn scenario(arg: ScenarioArg) -> Scenario {
    match arg {
        ScenarioArg::Optimal => Scenario::Optimal,
        ScenarioArg::Baseline => Scenario::Baseline,
    }
}

fn write_run(
    m: &mut Manifest,
    dir: &str,
    report: &SolveReport,
    a: Option<f64>,
    backstop: &[f64],
) -> Result<(), Failure> {
    m.write(&format!("{dir}trajectory.csv"), &trajectory_csv(report))?;
    m.write(&format!("{dir}report.txt"), &report_text(report, a, backstop))?;
    Ok(())
}

/// Backstop price per period; it does not depend on the damage coefficient.
fn backstop_path(cfg: &ModelConfig) -> Result<Vec<f64>, Failure> {
    let model = Model::new(cfg.clone()).map_err(|e| usage(format!("model: {e}")))?;
    Ok(model.paths.backstop_price)
}

fn cmd_solve(out: &Path, config: &Path, arg: ScenarioArg, run: &RunArgs) -> Result<u8, Failure> {
    let (cfg, settings) = run_config(config, run)?;
    let report = solve(&cfg, &scenario(arg), &settings).map_err(|e| usage(format!("model: {e}")))?;
    let mut m = Manifest::new(out, "solve", Some(config), &cfg, &settings);
    let backstop = backstop_path(&cfg)?;
    write_run(&mut m, "", &report, cfg.damage.coefficient(), &backstop)?;
    let code = status_code(report.status);
    m.status = report.status.to_string();
    m.exit_code = code;
    m.finish()?;
    if code != 0 {
        eprintln!("dice: {}", report.message);
    }
    Ok(code)
}

fn cmd_sweep(out: &Path, config: &Path, a_values: &[f64], arg: ScenarioArg, run: &RunArgs) -> Result<u8, Failure> {
    if a_values.is_empty() {
        return Err(usage("--a-values needs at least one value"));
    }
    let (cfg, settings) = run_config(config, run)?;
    let rows =
        sensitivity_sweep(&cfg, a_values, &scenario(arg), &settings).map_err(|e| usage(format!("model: {e}")))?;
    let mut m = Manifest::new(out, "sweep", Some(config), &cfg, &settings);
    m.write("summary.csv", &summary_csv(&rows))?;
    let backstop = backstop_path(&cfg)?;
    for row in &rows {
        if let Ok(report) = &row.result {
            write_run(
                &mut m,
                &format!("a_{}/", fmt_float(row.a)),
                report,
                Some(row.a),
                &backstop,
            )?;
        }
    }
    let runs: Vec<SweepRun<'_>> = rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(|report| SweepRun { a: r.a, report }))
        .collect();
    m.write("fig4_output.svg", &figures::output_figure(&runs, &cfg))?;
    m.write("fig5_rates.svg", &figures::rates_figure(&runs, &cfg))?;
    m.write("fig6_capital.svg", &figures::capital_figure(&runs, &cfg))?;

    let statuses: Vec<SolveStatus> = runs.iter().map(|r| r.report.status).collect();
    let code = if statuses.contains(&SolveStatus::Converged) {
        0
    } else if statuses.contains(&SolveStatus::Stalled) {
        3
    } else {
        2
    };
    m.status = statuses.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",");
    m.exit_code = code;
    m.finish()?;
    for row in &rows {
        match &row.result {
            Ok(r) if !r.converged() => eprintln!("dice: a = {}: {}", fmt_float(row.a), r.message),
            Err(e) => eprintln!("dice: a = {}: {e}", fmt_float(row.a)),
            _ => {}
        }
    }
    Ok(code)
}

fn ramsey_params(cfg: &ModelConfig, tfp: f64) -> RamseyParams {
    RamseyParams::stationary(cfg.alpha(), cfg.rho(), cfg.delta(), cfg.gamma(), tfp)
}

fn cmd_figures(out: &Path, which: FigureArg, config: Option<&Path>) -> Result<u8, Failure> {
    let cfg = read_config(config)?;
    let mut m = Manifest::new(out, "figures", config, &cfg, &SolverSettings::default());
    let all = which == FigureArg::All;
    if all || which == FigureArg::Fig1 {
        m.write("fig1_estimates.svg", &figures::estimates_figure(&cfg))?;
    }
    if all || which == FigureArg::Fig2 {
        m.write("fig2_genealogy.svg", &figures::genealogy_figure(&cfg))?;
    }
    if all || which == FigureArg::Fig3 {
        let svg = figures::regression_figure(&cfg, cfg.regression).map_err(|e| usage(e.to_string()))?;
        m.write("fig3_regression.svg", &svg)?;
    }
    if all || which == FigureArg::Phase {
        let params = ramsey_params(&cfg, 1.0);
        let comments = vec![format!("config-hash {}", cfg.hash())];
        let svg = figures::phase_portrait(&params, comments).map_err(|e| usage(e.to_string()))?;
        m.write("ramsey_phase.svg", &svg)?;
    }
    m.status = "ok".into();
    m.finish()?;
    Ok(0)
}

fn cmd_ramsey(out: &Path, config: Option<&Path>, k0_ratio: f64, tfp: f64, horizon: f64) -> Result<u8, Failure> {
    let cfg = read_config(config)?;
    if !(k0_ratio.is_finite() && k0_ratio > 0.0) {
        return Err(usage("--k0-ratio must be positive"));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(usage("--horizon must be positive"));
    }
    let params = ramsey_params(&cfg, tfp);
    params.validate().map_err(|e| usage(e.to_string()))?;
    let ss = steady_state(&params).map_err(|e| usage(e.to_string()))?;
    let sp = saddle_path(&params, k0_ratio * ss.k_star, horizon).map_err(|e| usage(e.to_string()))?;
    let tv = transversality_diagnostic(&sp.path, &params);
    let eig = jacobian_eigenvalues(&ss, &params);

    let mut csv = String::from("t,k,c\n");
    for ((t, k), c) in sp.path.t.iter().zip(&sp.path.k).zip(&sp.path.c) {
        csv.push_str(&format!("{},{},{}\n", fmt_float(*t), fmt_float(*k), fmt_float(*c)));
    }
    let captured = sp.path.captured_at.map(fmt_float).unwrap_or_else(|| "none".into());
    let report = format!(
        "alpha: {}\nrho: {}\ndelta: {}\ngamma: {}\ntfp: {}\nk_star: {}\nc_star: {}\neigenvalues: {} {}\nk0: {}\nc0: {}\ncaptured_at: {captured}\ntransversality: {:?}\nconfig_hash: {}\n",
        fmt_float(params.alpha),
        fmt_float(params.rho),
        fmt_float(params.delta),
        fmt_float(params.gamma),
        fmt_float(params.a),
        fmt_float(ss.k_star),
        fmt_float(ss.c_star),
        fmt_float(eig[0].re),
        fmt_float(eig[1].re),
        fmt_float(k0_ratio * ss.k_star),
        fmt_float(sp.c0),
        tv.outcome,
        cfg.hash(),
    );
    let mut m = Manifest::new(out, "ramsey", config, &cfg, &SolverSettings::default());
    m.write("saddle_path.csv", &csv)?;
    m.write("ramsey.txt", &report)?;
    let comments = vec![format!("config-hash {}", cfg.hash())];
    let svg = figures::phase_portrait(&params, comments).map_err(|e| usage(e.to_string()))?;
    m.write("ramsey_phase.svg", &svg)?;
    m.status = "ok".into();
    m.finish()?;
    Ok(0)
}

fn cmd_regress(out: &Path, variant: Option<VariantArg>, config: Option<&Path>) -> Result<u8, Failure> {
    let cfg = read_config(config)?;
    let variant = variant.map(FitVariant::from).unwrap_or(cfg.regression);
    let states = load_states().map_err(|e| usage(e.to_string()))?;
    let chosen = fit(&states, variant).map_err(|e| usage(e.to_string()))?;
    let dice_a = figures::ESTIMATE_CURVE_A;
    let cmp = compare_to_dice(&chosen, dice_a);

    let mut csv = String::from("state,dtemp,dgsp_percap,fitted_usd,residual_usd\n");
    let fitted = states.iter().filter(|r| !r.is_aggregate()).zip(&chosen.residuals);
    for (r, res) in fitted {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.state,
            fmt_float(r.dtemp),
            fmt_float(r.dgsp_percap),
            fmt_float(chosen.predict(r.dtemp) * chosen.national_mean),
            fmt_float(*res)
        ));
    }
    let mut txt = format!(
        "variant: {variant}\nbeta: {}\nintercept: {}\nr_squared: {}\nnational_mean_usd: {}\n|beta| vs dice a = {}: {:?}\n\nall variants:\n",
        fmt_float(chosen.beta),
        fmt_float(chosen.intercept),
        fmt_float(chosen.r_squared),
        fmt_float(chosen.national_mean),
        fmt_float(dice_a),
        cmp.verdict,
    );
    for v in FitVariant::ALL {
        let f = fit(&states, v).map_err(|e| usage(e.to_string()))?;
        txt.push_str(&format!(
            "{v}: beta {} intercept {} r_squared {}\n",
            fmt_float(f.beta),
            fmt_float(f.intercept),
            fmt_float(f.r_squared)
        ));
    }
    let mut m = Manifest::new(out, "regress", config, &cfg, &SolverSettings::default());
    m.write("regression.csv", &csv)?;
    m.write("regression.txt", &txt)?;
    let svg = figures::regression_figure(&cfg, variant).map_err(|e| usage(e.to_string()))?;
    m.write("fig3_regression.svg", &svg)?;
    m.status = "ok".into();
    m.finish()?;
    Ok(0)
}
