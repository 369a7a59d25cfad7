use serde::Serialize;

use crate::data::{Dataset, PenaltySpec};
use crate::error::{Error, Result};
use crate::screening::{marginal_screen, two_step_from_screen, SecondStage};
use crate::solvers::{
    bridge_fit, enet_fit, lasso_fit, ols_fit, ridge_fit, FitResult, SolverConfig,
};

use super::metrics::pmse;

/// An estimator with every hyperparameter except `lambda` fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fitter {
    Ols,
    Ridge,
    Lasso,
    Enet {
        lambda2: f64,
    },
    Bridge {
        gamma: f64,
    },
    /// Marginal bridge screen followed by OLS on the selected covariates.
    TwoStep {
        gamma: f64,
    },
}

impl Fitter {
    pub fn fit(
        &self,
        train: &Dataset<f64>,
        lambda: f64,
        config: &SolverConfig<f64>,
    ) -> Result<FitResult<f64>> {
        match *self {
            Fitter::Ols => ols_fit(train),
            Fitter::Ridge => ridge_fit(train, lambda),
            Fitter::Lasso => lasso_fit(train, lambda, config),
            Fitter::Enet { lambda2 } => enet_fit(train, lambda, lambda2, config),
            Fitter::Bridge { gamma } => {
                bridge_fit(train, &PenaltySpec::new(lambda, gamma)?, config)
            }
            Fitter::TwoStep { gamma } => {
                let pen = PenaltySpec::new(lambda, gamma)?;
                let screen = marginal_screen(train, &pen)?;
                two_step_from_screen(train, &screen, SecondStage::Ols, &pen, config)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tuned {
    pub lambda: f64,
    pub valid_mse: f64,
    pub fit: FitResult<f64>,
}

/// Fits on `train` (standardised) at every grid value and keeps the one with
/// the smallest validation MSE. Ties go to the larger `lambda`; a grid value
/// whose fit fails counts as infinite MSE.
pub fn tune_lambda(
    fitter: &Fitter,
    grid: &[f64],
    train: &Dataset<f64>,
    valid: &Dataset<f64>,
    config: &SolverConfig<f64>,
) -> Result<Tuned> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&bad) = grid.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidPenalty(format!("grid value {bad}")));
    }
    let offsets = train.standardization().ok_or(Error::NotStandardized)?;
    let mut values = grid.to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    values.dedup();
    let mut best: Option<Tuned> = None;
    for lambda in values {
        let Ok(fit) = fitter.fit(train, lambda, config) else {
            continue;
        };
        let mse = pmse(&fit, offsets, valid)?;
        if best.as_ref().map_or(true, |b| mse < b.valid_mse) {
            best = Some(Tuned {
                lambda,
                valid_mse: mse,
                fit,
            });
        }
    }
    best.ok_or(Error::TuningFailed)
}

/// `count` values from `start` to `stop` inclusive, evenly spaced on a log
/// scale when `log` is set and linearly otherwise.
pub fn grid(start: f64, stop: f64, count: usize, log: bool) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::EmptyGrid);
    }
    if !start.is_finite() || !stop.is_finite() || (log && (start <= 0.0 || stop <= 0.0)) {
        return Err(Error::InvalidPenalty(format!("grid bounds {start}:{stop}")));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let t = |k: usize| k as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            if log {
                (start.ln() + t(k) * (stop.ln() - start.ln())).exp()
            } else {
                start + t(k) * (stop - start)
            }
        })
        .collect())
}

/// Lower and upper end of the default `lambda / n` range.
pub const LAMBDA_OVER_N_RANGE: (f64, f64) = (1e-4, 1e2);
pub const GRID_SIZE: usize = 50;
pub const ENET_L1_SIZE: usize = 10;
/// Ridge weights `lambda2 / n` paired with each elastic-net `lambda1`.
pub const ENET_L2_OVER_N: [f64; 5] = [1e-3, 1e-2, 1e-1, 1.0, 10.0];

/// Default grid of raw `lambda` values for `n` training rows.
pub fn default_grid(n: usize) -> Vec<f64> {
    let (a, b) = LAMBDA_OVER_N_RANGE;
    grid(a, b, GRID_SIZE, true)
        .expect("constant grid bounds are valid")
        .into_iter()
        .map(|v| v * n as f64)
        .collect()
}

pub fn default_enet_l1_grid(n: usize) -> Vec<f64> {
    let (a, b) = LAMBDA_OVER_N_RANGE;
    grid(a, b, ENET_L1_SIZE, true)
        .expect("constant grid bounds are valid")
        .into_iter()
        .map(|v| v * n as f64)
        .collect()
}
