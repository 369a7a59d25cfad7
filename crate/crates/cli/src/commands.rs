use std::path::{Path, PathBuf};

use bridgex_core::sim::{
    default_grid, run_benchmark, tune_lambda, BenchConfig, BenchMethod, Fitter, ReplicationReport,
    ScenarioSpec,
};
use bridgex_core::{
    bridge_fit, c_gamma, eigen_diagnostics, enet_fit, lasso_fit, marginal_screen, ols_fit,
    ridge_fit, standard_errors, standardize, two_step_from_screen, Dataset, EigenDiagnostics,
    FitResult, FitWarning, PenaltySpec, ScreenResult, SecondStage, SolverConfig,
};
use serde::Serialize;

use crate::args::{
    Command, DiagnoseArgs, FitArgs, FitMethod, LambdaSpec, ScreenArgs, SimulateArgs, StageArg,
    TuneArgs, TuneMethod, TwoStepArgs,
};
use crate::error::{CliError, Status};
use crate::input::{load, Table};
use crate::report;

/// Resolved settings of one invocation, embedded in every report.
#[derive(Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub input_path: Option<PathBuf>,
    pub valid_path: Option<PathBuf>,
    pub response_column: Option<String>,
    pub method: Option<String>,
    pub lambda: Option<LambdaSpec>,
    pub lambda2: Option<f64>,
    pub gamma: Option<f64>,
    pub second_stage: Option<StageArg>,
    pub second_lambda: Option<f64>,
    pub standard_errors: bool,
    pub selected: Option<Vec<String>>,
    pub scenario_id: Option<u32>,
    pub methods: Option<Vec<BenchMethod>>,
    pub replicates: Option<usize>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
    pub solver: Option<SolverConfig<f64>>,
}

#[derive(Serialize)]
struct Report<'a, B: Serialize> {
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: B,
}

fn emit<B: Serialize>(config: &RunConfig, body: B) -> Result<(), CliError> {
    let text = report::to_json(&Report {
        command: config.command,
        seed: config.seed,
        config,
        body,
    });
    report::write(config.output_path.as_deref(), &text)?;
    Ok(())
}

pub fn run(command: Command) -> Result<Status, CliError> {
    match command {
        Command::Fit(a) => fit(a),
        Command::Screen(a) => screen(a),
        Command::Twostep(a) => two_step(a),
        Command::Tune(a) => tune(a),
        Command::Simulate(a) => simulate(a),
        Command::Diagnose(a) => diagnose(a),
    }
}

fn standardized(table: &Table) -> Result<Dataset<f64>, CliError> {
    standardize(&table.data).map_err(|e| match e {
        bridgex_core::Error::ConstantColumn(j) => {
            CliError::Data(format!("column {:?} is constant", table.columns[j]))
        }
        other => other.into(),
    })
}

fn bridge_gamma(gamma: f64) -> Result<f64, CliError> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(gamma)
    } else {
        Err(CliError::Usage(format!("--gamma must lie in (0, 1), got {gamma}")))
    }
}

#[derive(Serialize)]
struct Interval {
    column: String,
    estimate: f64,
    se: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct StdErrSection {
    sigma_hat_sq: f64,
    df: usize,
    coefficients: Vec<Interval>,
}

/// Coefficients on both scales plus convergence details.
#[derive(Serialize)]
struct FitSection {
    method: &'static str,
    objective: f64,
    converged: bool,
    iterations: usize,
    warnings: Vec<FitWarning>,
    columns: Vec<String>,
    /// Standardised-scale coefficients, one per column.
    coefficients: Vec<f64>,
    selected: Vec<String>,
    /// Raw-scale model `intercept + sum_j raw_coefficients[j] x_j`.
    intercept: f64,
    raw_coefficients: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    standard_errors: Option<StdErrSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    standard_errors_unavailable: Option<String>,
}

const Z_975: f64 = 1.959963984540054;

fn fit_section(
    table: &Table,
    data: &Dataset<f64>,
    fit: &FitResult<f64>,
    with_se: bool,
) -> Result<FitSection, CliError> {
    let t = data.standardization().ok_or(bridgex_core::Error::NotStandardized)?;
    let raw: Vec<f64> = fit
        .values()
        .iter()
        .zip(&t.x_scales)
        .map(|(b, s)| b / s)
        .collect();
    let intercept = t.y_mean - raw.iter().zip(&t.x_means).map(|(b, m)| b * m).sum::<f64>();
    let name = |j: usize| table.columns[j].clone();
    let (standard_errors, standard_errors_unavailable) = if with_se {
        match standard_errors(data, fit) {
            Ok(r) => {
                let coefficients = r
                    .selected
                    .iter()
                    .zip(&r.se)
                    .map(|(&j, &se)| {
                        let b = fit.values()[j];
                        Interval {
                            column: name(j),
                            estimate: b,
                            se,
                            lower: b - Z_975 * se,
                            upper: b + Z_975 * se,
                        }
                    })
                    .collect();
                (
                    Some(StdErrSection {
                        sigma_hat_sq: r.sigma_hat_sq,
                        df: r.df_used,
                        coefficients,
                    }),
                    None,
                )
            }
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    Ok(FitSection {
        method: fit.method.as_str(),
        objective: fit.objective,
        converged: fit.converged,
        iterations: fit.iterations,
        warnings: fit.warnings.clone(),
        columns: table.columns.clone(),
        coefficients: fit.values().to_vec(),
        selected: fit.coefficients.nonzero_indices.iter().map(|&j| name(j)).collect(),
        intercept,
        raw_coefficients: raw,
        standard_errors,
        standard_errors_unavailable,
    })
}

fn fit(a: FitArgs) -> Result<Status, CliError> {
    let cfg = a.solver.config();
    cfg.validate()?;
    if a.method == FitMethod::Bridge {
        bridge_gamma(a.gamma)?;
    }
    let config = RunConfig {
        command: "fit",
        input_path: Some(a.data.input.clone()),
        response_column: Some(a.data.response.clone()),
        method: Some(format!("{:?}", a.method).to_lowercase()),
        lambda: Some(LambdaSpec::Value(a.lambda)),
        lambda2: (a.method == FitMethod::Enet).then_some(a.lambda2),
        gamma: (a.method == FitMethod::Bridge).then_some(a.gamma),
        standard_errors: a.se,
        seed: a.out.seed,
        output_path: a.out.output.clone(),
        solver: Some(cfg),
        ..Default::default()
    };
    let penalty = PenaltySpec::new(a.lambda, if a.method == FitMethod::Bridge { a.gamma } else { 1.0 })?;
    if a.method == FitMethod::Enet && !(a.lambda2 >= 0.0 && a.lambda2.is_finite()) {
        return Err(CliError::Usage(format!("--lambda2 must be nonnegative, got {}", a.lambda2)));
    }
    let table = load(&a.data.input, &a.data.response, None)?;
    let data = standardized(&table)?;
    let result = match a.method {
        FitMethod::Ols => ols_fit(&data)?,
        FitMethod::Ridge => ridge_fit(&data, a.lambda)?,
        FitMethod::Lasso => lasso_fit(&data, a.lambda, &cfg)?,
        FitMethod::Enet => enet_fit(&data, a.lambda, a.lambda2, &cfg)?,
        FitMethod::Bridge => bridge_fit(&data, &penalty, &cfg)?,
    };
    let section = fit_section(&table, &data, &result, a.se)?;
    emit(&config, FitBody { fit: section })?;
    Ok(Status::from_converged(result.converged))
}

#[derive(Serialize)]
struct FitBody {
    fit: FitSection,
}

#[derive(Serialize)]
struct ScreenSection {
    columns: Vec<String>,
    c_gamma: f64,
    lambda_over_n: f64,
    gamma: f64,
    marginal_stat: Vec<f64>,
    threshold_rhs: Vec<f64>,
    /// Zero-based column indices.
    selected_indices: Vec<usize>,
    selected: Vec<String>,
}

fn screen_section(table: &Table, s: &ScreenResult<f64>) -> Result<ScreenSection, CliError> {
    Ok(ScreenSection {
        columns: table.columns.clone(),
        c_gamma: c_gamma(s.gamma)?,
        lambda_over_n: s.lambda_over_n,
        gamma: s.gamma,
        marginal_stat: s.marginal_stat.clone(),
        threshold_rhs: s.threshold_rhs.clone(),
        selected_indices: s.selected.clone(),
        selected: s.selected.iter().map(|&j| table.columns[j].clone()).collect(),
    })
}

fn screen(a: ScreenArgs) -> Result<Status, CliError> {
    let penalty = PenaltySpec::new(a.lambda, bridge_gamma(a.gamma)?)?;
    let config = RunConfig {
        command: "screen",
        input_path: Some(a.data.input.clone()),
        response_column: Some(a.data.response.clone()),
        method: Some("marginal-bridge".into()),
        lambda: Some(LambdaSpec::Value(a.lambda)),
        gamma: Some(a.gamma),
        seed: a.out.seed,
        output_path: a.out.output.clone(),
        ..Default::default()
    };
    let table = load(&a.data.input, &a.data.response, None)?;
    let data = standardized(&table)?;
    let s = marginal_screen(&data, &penalty)?;
    #[derive(Serialize)]
    struct Body {
        screen: ScreenSection,
    }
    emit(&config, Body { screen: screen_section(&table, &s)? })?;
    Ok(Status::Ok)
}

fn two_step(a: TwoStepArgs) -> Result<Status, CliError> {
    let cfg = a.solver.config();
    cfg.validate()?;
    let gamma = bridge_gamma(a.gamma)?;
    let screen_pen = PenaltySpec::new(a.lambda, gamma)?;
    let second_pen = PenaltySpec::new(a.second_lambda, gamma)?;
    let config = RunConfig {
        command: "twostep",
        input_path: Some(a.data.input.clone()),
        response_column: Some(a.data.response.clone()),
        method: Some("twostep".into()),
        lambda: Some(LambdaSpec::Value(a.lambda)),
        gamma: Some(a.gamma),
        second_stage: Some(a.second_stage),
        second_lambda: (a.second_stage == StageArg::Bridge).then_some(a.second_lambda),
        standard_errors: a.se,
        seed: a.out.seed,
        output_path: a.out.output.clone(),
        solver: Some(cfg),
        ..Default::default()
    };
    let table = load(&a.data.input, &a.data.response, None)?;
    let data = standardized(&table)?;
    let s = marginal_screen(&data, &screen_pen)?;
    let stage = match a.second_stage {
        StageArg::Ols => SecondStage::Ols,
        StageArg::Bridge => SecondStage::Bridge,
    };
    let result = two_step_from_screen(&data, &s, stage, &second_pen, &cfg)?;
    #[derive(Serialize)]
    struct Body {
        screen: ScreenSection,
        fit: FitSection,
    }
    emit(
        &config,
        Body {
            screen: screen_section(&table, &s)?,
            fit: fit_section(&table, &data, &result, a.se)?,
        },
    )?;
    Ok(Status::from_converged(result.converged))
}

fn tune(a: TuneArgs) -> Result<Status, CliError> {
    let cfg = a.solver.config();
    cfg.validate()?;
    let fitter = match a.method {
        TuneMethod::Ridge => Fitter::Ridge,
        TuneMethod::Lasso => Fitter::Lasso,
        TuneMethod::Enet => {
            if !(a.lambda2 >= 0.0 && a.lambda2.is_finite()) {
                return Err(CliError::Usage(format!("--lambda2 must be nonnegative, got {}", a.lambda2)));
            }
            Fitter::Enet { lambda2: a.lambda2 }
        }
        TuneMethod::Bridge => Fitter::Bridge {
            gamma: bridge_gamma(a.gamma)?,
        },
        TuneMethod::Twostep => Fitter::TwoStep {
            gamma: bridge_gamma(a.gamma)?,
        },
    };
    let explicit = a.lambda.as_ref().map(|l| l.values()).transpose()?;
    let table = load(&a.data.input, &a.data.response, None)?;
    let valid = load(&a.valid, &a.data.response, Some(&table.columns))?;
    let data = standardized(&table)?;
    let lambdas = explicit.unwrap_or_else(|| default_grid(data.n()));
    let config = RunConfig {
        command: "tune",
        input_path: Some(a.data.input.clone()),
        valid_path: Some(a.valid.clone()),
        response_column: Some(a.data.response.clone()),
        method: Some(format!("{:?}", a.method).to_lowercase()),
        lambda: a.lambda.clone(),
        lambda2: matches!(fitter, Fitter::Enet { .. }).then_some(a.lambda2),
        gamma: matches!(fitter, Fitter::Bridge { .. } | Fitter::TwoStep { .. }).then_some(a.gamma),
        seed: a.out.seed,
        output_path: a.out.output.clone(),
        solver: Some(cfg),
        ..Default::default()
    };
    let tuned = tune_lambda(&fitter, &lambdas, &data, &valid.data, &cfg)?;
    #[derive(Serialize)]
    struct Body {
        lambda_grid: Vec<f64>,
        best_lambda: f64,
        valid_mse: f64,
        fit: FitSection,
    }
    emit(
        &config,
        Body {
            lambda_grid: lambdas,
            best_lambda: tuned.lambda,
            valid_mse: tuned.valid_mse,
            fit: fit_section(&table, &data, &tuned.fit, false)?,
        },
    )?;
    Ok(Status::from_converged(tuned.fit.converged))
}

fn parse_methods(list: Option<&str>) -> Result<Vec<BenchMethod>, CliError> {
    let Some(list) = list else {
        return Ok(BenchMethod::ALL.to_vec());
    };
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m = BenchMethod::parse(name)
            .ok_or_else(|| CliError::Usage(format!("unknown method {name:?}")))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("--methods lists no methods".into()));
    }
    Ok(out)
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("BRIDGEX_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "BRIDGEX_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn simulate(a: SimulateArgs) -> Result<Status, CliError> {
    let cfg = a.solver.config();
    cfg.validate()?;
    let gamma = bridge_gamma(a.gamma)?;
    if a.replicates == 0 {
        return Err(CliError::Usage("--replicates must be at least 1".into()));
    }
    if a.baseline_max_sweeps == 0 {
        return Err(CliError::Usage("--baseline-max-sweeps must be at least 1".into()));
    }
    let methods = parse_methods(a.methods.as_deref())?;
    let spec = ScenarioSpec::example(a.scenario)?;
    let threads = thread_cap()?;
    let config = RunConfig {
        command: "simulate",
        gamma: Some(gamma),
        scenario_id: Some(a.scenario),
        methods: Some(methods.clone()),
        replicates: Some(a.replicates),
        seed: a.out.seed,
        output_path: a.out.output.clone(),
        csv_path: a.csv.clone(),
        solver: Some(cfg),
        ..Default::default()
    };
    let bench = BenchConfig {
        gamma,
        solver: cfg,
        baseline_max_sweeps: a.baseline_max_sweeps,
        ..Default::default()
    };
    let run = || run_benchmark(&spec, &methods, a.replicates, a.out.seed, &bench);
    let result = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(run),
        None => run(),
    }?;
    if let Some(path) = &a.csv {
        write_figure_csv(path, &result)?;
    }
    #[derive(Serialize)]
    struct Body<'a> {
        report: &'a ReplicationReport,
    }
    emit(&config, Body { report: &result })?;
    Ok(Status::Ok)
}

fn write_figure_csv(path: &Path, report: &ReplicationReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Data(e.to_string()))?;
    let csv_err = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(["method", "covariate", "frequency"]).map_err(csv_err)?;
    for (m, j, f) in report.figure_rows() {
        w.write_record([m.as_str().to_owned(), j.to_string(), format!("{f:.16e}")])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn diagnose(a: DiagnoseArgs) -> Result<Status, CliError> {
    let names: Vec<String> = a
        .selected
        .as_deref()
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect();
    let config = RunConfig {
        command: "diagnose",
        input_path: Some(a.data.input.clone()),
        response_column: Some(a.data.response.clone()),
        selected: Some(names.clone()),
        seed: a.out.seed,
        output_path: a.out.output.clone(),
        ..Default::default()
    };
    let table = load(&a.data.input, &a.data.response, None)?;
    let mut idx = names
        .iter()
        .map(|n| table.index_of(n))
        .collect::<Result<Vec<_>, _>>()?;
    idx.sort_unstable();
    idx.dedup();
    let data = standardized(&table)?;
    let d = eigen_diagnostics(&data, &idx)?;
    #[derive(Serialize)]
    struct Body {
        columns: Vec<String>,
        selected_indices: Vec<usize>,
        diagnostics: EigenDiagnostics<f64>,
    }
    emit(
        &config,
        Body {
            columns: table.columns.clone(),
            selected_indices: idx,
            diagnostics: d,
        },
    )?;
    Ok(Status::Ok)
}
