use rayon::prelude::*;
use serde::Serialize;

use crate::data::CoefficientPartition;
use crate::error::{Error, Result};
use crate::solvers::{FitResult, SolverConfig};

use super::metrics::{emse, median, pmse, sample_sd, selection_stats};
use super::scenario::{Replicate, ScenarioDesign, ScenarioSpec};
use super::tuning::{
    default_enet_l1_grid, default_grid, tune_lambda, Fitter, Tuned, ENET_L2_OVER_N,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BenchMethod {
    #[serde(rename = "ols")]
    Ols,
    #[serde(rename = "ridge")]
    Ridge,
    #[serde(rename = "lasso")]
    Lasso,
    #[serde(rename = "enet")]
    Enet,
    /// Direct bridge fit when `p < n`, marginal screen plus OLS otherwise.
    #[serde(rename = "bridge")]
    Bridge,
    /// OLS on the true support.
    #[serde(rename = "ols-oracle")]
    OlsOracle,
    /// Tuned bridge on the true support.
    #[serde(rename = "bridge-oracle")]
    BridgeOracle,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 7] = [
        BenchMethod::Ols,
        BenchMethod::Ridge,
        BenchMethod::Lasso,
        BenchMethod::Enet,
        BenchMethod::Bridge,
        BenchMethod::OlsOracle,
        BenchMethod::BridgeOracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchMethod::Ols => "ols",
            BenchMethod::Ridge => "ridge",
            BenchMethod::Lasso => "lasso",
            BenchMethod::Enet => "enet",
            BenchMethod::Bridge => "bridge",
            BenchMethod::OlsOracle => "ols-oracle",
            BenchMethod::BridgeOracle => "bridge-oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

impl std::fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tuning grids on the `lambda / n` scale; multiplied by `n_train` before use.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchGrids {
    pub lambda_over_n: Vec<f64>,
    pub enet_l1_over_n: Vec<f64>,
    pub enet_l2_over_n: Vec<f64>,
}

impl Default for BenchGrids {
    fn default() -> Self {
        Self {
            lambda_over_n: default_grid(1),
            enet_l1_over_n: default_enet_l1_grid(1),
            enet_l2_over_n: ENET_L2_OVER_N.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub gamma: f64,
    pub solver: SolverConfig<f64>,
    /// Sweep budget for the LASSO and elastic-net baselines. Near-interpolating
    /// fits at the bottom of the grid converge very slowly when `p > n`.
    pub baseline_max_sweeps: usize,
    pub grids: BenchGrids,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            solver: SolverConfig::default(),
            baseline_max_sweeps: 10_000,
            grids: BenchGrids::default(),
        }
    }
}

/// Result of one tuned method on one replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodOutcome {
    pub lambda: Option<f64>,
    pub lambda2: Option<f64>,
    pub pmse: f64,
    pub emse: f64,
    pub n_selected: usize,
    pub correct: Vec<bool>,
    pub converged: bool,
    #[serde(skip)]
    pub fit: FitResult<f64>,
}

fn scaled(grid: &[f64], n: usize) -> Vec<f64> {
    grid.iter().map(|v| v * n as f64).collect()
}

/// Tunes and evaluates `method` on one replicate.
pub fn run_method(
    design: &ScenarioDesign,
    rep: &Replicate,
    method: BenchMethod,
    config: &BenchConfig,
) -> Result<MethodOutcome> {
    let spec = &design.spec;
    let n = rep.train.n();
    let grid = scaled(&config.grids.lambda_over_n, n);
    let solver = &config.solver;
    let baseline = SolverConfig {
        max_iter: config.baseline_max_sweeps,
        ..config.solver
    };
    let on_all = |fitter: Fitter, grid: &[f64]| {
        let cfg = match fitter {
            Fitter::Lasso | Fitter::Enet { .. } => &baseline,
            _ => solver,
        };
        tune_lambda(&fitter, grid, &rep.train, &rep.valid, cfg)
    };
    let (tuned, lambda2): (Tuned, Option<f64>) = match method {
        BenchMethod::Ols => {
            let fit = Fitter::Ols.fit(&rep.train, 0.0, solver)?;
            (untuned(fit), None)
        }
        BenchMethod::Ridge => (on_all(Fitter::Ridge, &grid)?, None),
        BenchMethod::Lasso => (on_all(Fitter::Lasso, &grid)?, None),
        BenchMethod::Enet => {
            let l1 = scaled(&config.grids.enet_l1_over_n, n);
            let mut l2s = scaled(&config.grids.enet_l2_over_n, n);
            l2s.sort_by(|a, b| b.total_cmp(a));
            let mut best: Option<(Tuned, f64)> = None;
            for l2 in l2s {
                if let Ok(t) = on_all(Fitter::Enet { lambda2: l2 }, &l1) {
                    if best
                        .as_ref()
                        .map_or(true, |(b, _)| t.valid_mse < b.valid_mse)
                    {
                        best = Some((t, l2));
                    }
                }
            }
            let (t, l2) = best.ok_or(Error::TuningFailed)?;
            (t, Some(l2))
        }
        BenchMethod::Bridge => {
            let fitter = if spec.p >= n {
                Fitter::TwoStep {
                    gamma: config.gamma,
                }
            } else {
                Fitter::Bridge {
                    gamma: config.gamma,
                }
            };
            (on_all(fitter, &grid)?, None)
        }
        BenchMethod::OlsOracle | BenchMethod::BridgeOracle => {
            let support = spec.support();
            let train = rep.train.select_columns(&support);
            let valid = rep.valid.select_columns(&support);
            let mut t = if method == BenchMethod::OlsOracle {
                untuned(Fitter::Ols.fit(&train, 0.0, solver)?)
            } else {
                tune_lambda(
                    &Fitter::Bridge {
                        gamma: config.gamma,
                    },
                    &grid,
                    &train,
                    &valid,
                    solver,
                )?
            };
            t.fit.coefficients = CoefficientPartition::embed(spec.p, &support, t.fit.values());
            (t, None)
        }
    };
    let offsets = rep.train.standardization().ok_or(Error::NotStandardized)?;
    let fit = tuned.fit;
    let sel = selection_stats(&fit, &spec.beta0)?;
    Ok(MethodOutcome {
        lambda: tuned.lambda.is_finite().then_some(tuned.lambda),
        lambda2,
        pmse: pmse(&fit, offsets, &rep.test)?,
        emse: emse(fit.values(), &spec.beta0)?,
        n_selected: sel.n_selected,
        correct: sel.correct,
        converged: fit.converged,
        fit,
    })
}

fn untuned(fit: FitResult<f64>) -> Tuned {
    Tuned {
        lambda: f64::NAN,
        valid_mse: f64::NAN,
        fit,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: BenchMethod,
    /// Replicates whose fit or tuning failed; they are left out of every statistic.
    pub failures: usize,
    pub not_converged: usize,
    pub pmse_median: Option<f64>,
    pub pmse_sd: Option<f64>,
    pub emse_median: Option<f64>,
    pub emse_sd: Option<f64>,
    pub n_selected_median: Option<f64>,
    pub lambda_median: Option<f64>,
    /// Fraction of successful replicates classifying covariate `j` correctly.
    pub per_covariate_correct: Vec<f64>,
    pub pmse: Vec<f64>,
    pub emse: Vec<f64>,
    pub n_selected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub scenario: ScenarioSpec,
    pub seed: u64,
    pub replicates: usize,
    /// Random stream of replicate `r` is `r + 1`; stream 0 draws the design.
    pub replicate_streams: Vec<u64>,
    /// FNV-1a hash of the fixed training design.
    pub design_hash: String,
    pub config: BenchConfig,
    pub methods: Vec<MethodSummary>,
}

impl ReplicationReport {
    pub fn method(&self, m: BenchMethod) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == m)
    }

    /// Rows `(method, covariate, frequency)` of the per-covariate table.
    pub fn figure_rows(&self) -> Vec<(BenchMethod, usize, f64)> {
        self.methods
            .iter()
            .flat_map(|s| {
                s.per_covariate_correct
                    .iter()
                    .enumerate()
                    .map(move |(j, &f)| (s.method, j + 1, f))
            })
            .collect()
    }
}

/// Raw per-replicate outcomes, in replicate order.
pub fn run_replicates(
    design: &ScenarioDesign,
    methods: &[BenchMethod],
    replicates: usize,
    config: &BenchConfig,
) -> Result<Vec<Vec<Result<MethodOutcome>>>> {
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let rep = design.replicate(r)?;
            Ok(methods
                .iter()
                .map(|&m| run_method(design, &rep, m, config))
                .collect())
        })
        .collect()
}

pub fn run_benchmark(
    spec: &ScenarioSpec,
    methods: &[BenchMethod],
    replicates: usize,
    seed: u64,
    config: &BenchConfig,
) -> Result<ReplicationReport> {
    if replicates == 0 {
        return Err(Error::InvalidSpec("replicates must be at least 1".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidSpec("no methods requested".into()));
    }
    let design = ScenarioDesign::new(spec, seed)?;
    let outcomes = run_replicates(&design, methods, replicates, config)?;
    let summaries = methods
        .iter()
        .enumerate()
        .map(|(k, &m)| summarize(m, spec.p, outcomes.iter().map(|row| &row[k])))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicationReport {
        scenario: spec.clone(),
        seed,
        replicates,
        replicate_streams: (1..=replicates as u64).collect(),
        design_hash: format!("{:016x}", design_hash(design.x_train.as_col_major())),
        config: config.clone(),
        methods: summaries,
    })
}

fn summarize<'a>(
    method: BenchMethod,
    p: usize,
    outcomes: impl Iterator<Item = &'a Result<MethodOutcome>>,
) -> Result<MethodSummary> {
    let mut failures = 0;
    let ok: Vec<&MethodOutcome> = outcomes
        .filter_map(|o| match o {
            Ok(v) => Some(v),
            Err(_) => {
                failures += 1;
                None
            }
        })
        .collect();
    let pmse: Vec<f64> = ok.iter().map(|o| o.pmse).collect();
    let emse: Vec<f64> = ok.iter().map(|o| o.emse).collect();
    let n_selected: Vec<usize> = ok.iter().map(|o| o.n_selected).collect();
    let lambdas: Vec<f64> = ok.iter().filter_map(|o| o.lambda).collect();
    let med = |v: &[f64]| {
        if v.is_empty() {
            Ok(None)
        } else {
            median(v).map(Some)
        }
    };
    let mut per_covariate_correct = vec![0.0; p];
    for o in &ok {
        for (f, &c) in per_covariate_correct.iter_mut().zip(&o.correct) {
            if c {
                *f += 1.0;
            }
        }
    }
    if !ok.is_empty() {
        per_covariate_correct
            .iter_mut()
            .for_each(|f| *f /= ok.len() as f64);
    }
    let counts: Vec<f64> = n_selected.iter().map(|&c| c as f64).collect();
    Ok(MethodSummary {
        method,
        failures,
        not_converged: ok.iter().filter(|o| !o.converged).count(),
        pmse_median: med(&pmse)?,
        pmse_sd: sample_sd(&pmse),
        emse_median: med(&emse)?,
        emse_sd: sample_sd(&emse),
        n_selected_median: med(&counts)?,
        lambda_median: med(&lambdas)?,
        per_covariate_correct,
        pmse,
        emse,
        n_selected,
    })
}

fn design_hash(values: &[f64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    values
        .iter()
        .flat_map(|v| v.to_bits().to_le_bytes())
        .fold(OFFSET, |h, b| (h ^ b as u64).wrapping_mul(PRIME))
}
