use std::path::PathBuf;

use bridgex_core::sim::grid;
use bridgex_core::SolverConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "bridgex",
    version,
    about = "Bridge-penalised regression, marginal bridge screening and simulation benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one estimator at a fixed penalty.
    Fit(FitArgs),
    /// Marginal bridge screen of every covariate.
    Screen(ScreenArgs),
    /// Marginal screen followed by a refit on the selected covariates.
    Twostep(TwoStepArgs),
    /// Pick the penalty on a grid by validation MSE.
    Tune(TuneArgs),
    /// Replicated benchmark on one of the built-in scenarios.
    Simulate(SimulateArgs),
    /// Eigenvalue diagnostics of the design.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Header name of the response column.
    #[arg(long)]
    pub response: String,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Bridge flow increment.
    #[arg(long, default_value_t = 2e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub eta_floor: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig<f64> {
        SolverConfig {
            tol: self.tol,
            step: self.step,
            eta_floor: self.eta_floor,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Ols,
    Ridge,
    Lasso,
    Enet,
    Bridge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TuneMethod {
    Ridge,
    Lasso,
    Enet,
    Bridge,
    Twostep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageArg {
    Ols,
    Bridge,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum)]
    pub method: FitMethod,
    /// Penalty weight on the `RSS + lambda * penalty` scale.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Ridge weight of the elastic net.
    #[arg(long, default_value_t = 0.0)]
    pub lambda2: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Add standard errors and 95% intervals for the nonzero coefficients.
    #[arg(long)]
    pub se: bool,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct TwoStepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Screening penalty.
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = StageArg::Ols)]
    pub second_stage: StageArg,
    /// Penalty of the bridge refit.
    #[arg(long, default_value_t = 0.0)]
    pub second_lambda: f64,
    #[arg(long)]
    pub se: bool,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Validation CSV with the same column names as the training file.
    #[arg(long)]
    pub valid: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum)]
    pub method: TuneMethod,
    /// A value or a grid `start:stop:count[:log]`. Defaults to 50 log-spaced
    /// values of `lambda/n` between 1e-4 and 1e2.
    #[arg(long, value_parser = parse_lambda)]
    pub lambda: Option<LambdaSpec>,
    #[arg(long, default_value_t = 0.0)]
    pub lambda2: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario number, 1 to 6.
    #[arg(long)]
    pub scenario: u32,
    /// Comma-separated subset of ols, ridge, lasso, enet, bridge, ols-oracle,
    /// bridge-oracle. All of them by default.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Also write the per-covariate classification table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Sweep budget of the LASSO and elastic-net fits.
    #[arg(long, default_value_t = 10_000)]
    pub baseline_max_sweeps: usize,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Comma-separated covariate names forming the selected set.
    #[arg(long)]
    pub selected: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    Grid {
        start: f64,
        stop: f64,
        count: usize,
        log: bool,
    },
}

impl LambdaSpec {
    pub fn values(&self) -> bridgex_core::Result<Vec<f64>> {
        match *self {
            LambdaSpec::Value(v) => Ok(vec![v]),
            LambdaSpec::Grid {
                start,
                stop,
                count,
                log,
            } => grid(start, stop, count, log),
        }
    }
}

fn parse_lambda(s: &str) -> Result<LambdaSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [v] => Ok(LambdaSpec::Value(num(v)?)),
        [a, b, c] | [a, b, c, _] => {
            let log = match parts.get(3).map(|t| t.trim()) {
                None | Some("lin") => false,
                Some("log") => true,
                Some(other) => return Err(format!("grid scale must be log or lin, got {other:?}")),
            };
            let count = c
                .trim()
                .parse::<usize>()
                .map_err(|e| format!("{c:?}: {e}"))?;
            Ok(LambdaSpec::Grid {
                start: num(a)?,
                stop: num(b)?,
                count,
                log,
            })
        }
        _ => Err("expected a number or start:stop:count[:log]".into()),
    }
}
