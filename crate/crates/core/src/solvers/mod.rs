//! Penalised least-squares solvers.
//!
//! [`bridge_fit`] minimises `sum_i (y_i - x_i' b)^2 + lambda sum_j |b_j|^gamma`
//! for `0 < gamma < 1`; the remaining solvers are the OLS, ridge, LASSO and
//! elastic-net baselines.

mod baseline;
mod bridge;
mod cd;

use serde::Serialize;

use crate::data::{CoefficientPartition, Dataset, PenaltySpec};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, Scalar};

pub use baseline::{ols_fit, ridge_fit};
pub use bridge::{bridge_fit, smoothed_penalty_gradient};
pub use cd::{enet_fit, lasso_fit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<T> {
    /// Convergence criterion on the largest coordinate change.
    pub tol: T,
    /// Increment applied along the rescaled descent direction.
    pub step: T,
    /// Smallest smoothing constant in the approximate penalty gradient.
    pub eta_floor: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-4),
            step: T::lit(2e-3),
            eta_floor: T::lit(1e-4),
            max_iter: 200_000,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.tol) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if !pos(self.step) {
            return Err(Error::InvalidConfig("step must be positive".into()));
        }
        if !pos(self.eta_floor) {
            return Err(Error::InvalidConfig("eta_floor must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bridge,
    Ols,
    Ridge,
    Lasso,
    Enet,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bridge => "bridge",
            Method::Ols => "ols",
            Method::Ridge => "ridge",
            Method::Lasso => "lasso",
            Method::Enet => "enet",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWarning {
    /// Screening selected no covariates; the all-zero model was returned.
    EmptySelection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub coefficients: CoefficientPartition<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Value of the method's own objective at the returned coefficients.
    pub objective: T,
    pub method: Method,
    pub warnings: Vec<FitWarning>,
}

impl<T: Scalar> FitResult<T> {
    pub fn values(&self) -> &[T] {
        &self.coefficients.values
    }

    pub fn n_selected(&self) -> usize {
        self.coefficients.n_nonzero()
    }
}

/// `sum_i (y_i - x_i' beta)^2`
pub fn residual_sum_of_squares<T: Scalar>(data: &Dataset<T>, beta: &[T]) -> Result<T> {
    check_len(data.p(), beta.len())?;
    let fitted = data.x().mul_vec(beta);
    Ok(data
        .y()
        .iter()
        .zip(&fitted)
        .map(|(&y, &f)| (y - f) * (y - f))
        .sum())
}

/// Penalised least-squares objective `RSS(beta) + lambda sum_j |beta_j|^gamma`.
pub fn objective<T: Scalar>(data: &Dataset<T>, beta: &[T], penalty: &PenaltySpec<T>) -> Result<T> {
    let rss = residual_sum_of_squares(data, beta)?;
    Ok(rss + penalty.lambda * bridge_penalty(beta, penalty.gamma))
}

/// `sum_j |beta_j|^gamma` with `|0|^gamma = 0`.
pub fn bridge_penalty<T: Scalar>(beta: &[T], gamma: T) -> T {
    beta.iter()
        .filter(|b| **b != T::zero())
        .map(|b| b.abs().powf(gamma))
        .sum()
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Sufficient statistics of a least-squares problem with lazily computed
/// Gram columns. Solvers that only ever touch a few active coordinates never
/// pay for the full `p x p` Gram matrix.
pub(crate) struct Design<'a, T> {
    x: &'a Matrix<T>,
    /// `X'y`
    pub xty: Vec<T>,
    /// `diag(X'X)`
    pub diag: Vec<T>,
    pub yty: T,
    cols: Vec<Option<Vec<T>>>,
}

impl<'a, T: Scalar> Design<'a, T> {
    pub fn new(data: &'a Dataset<T>) -> Self {
        let x = data.x();
        let p = x.ncols();
        Self {
            x,
            xty: x.tr_mul_vec(data.y()),
            diag: (0..p).map(|j| dot(x.column(j), x.column(j))).collect(),
            yty: data.sum_sq_y(),
            cols: vec![None; p],
        }
    }

    pub fn p(&self) -> usize {
        self.diag.len()
    }

    /// Column `k` of `X'X`.
    pub fn gram_col(&mut self, k: usize) -> &[T] {
        if self.cols[k].is_none() {
            let xk = self.x.column(k);
            let col = (0..self.x.ncols())
                .map(|j| dot(self.x.column(j), xk))
                .collect();
            self.cols[k] = Some(col);
        }
        self.cols[k].as_deref().expect("gram column just filled")
    }

    /// Column `k` of `X'X`, which must already have been computed.
    pub fn gram_col_cached(&self, k: usize) -> &[T] {
        self.cols[k].as_deref().expect("gram column computed earlier")
    }

    /// `grad -= G[:, k] * delta`, keeping `grad = X'y - X'X beta` current.
    pub fn update_gradient(&mut self, grad: &mut [T], k: usize, delta: T) {
        let col = self.gram_col(k);
        for (g, &c) in grad.iter_mut().zip(col) {
            *g -= c * delta;
        }
    }

    /// Recomputes `X'y - X'X beta` from scratch.
    pub fn gradient(&mut self, beta: &[T]) -> Vec<T> {
        let mut grad = self.xty.clone();
        for (k, &b) in beta.iter().enumerate() {
            if b != T::zero() {
                self.update_gradient(&mut grad, k, b);
            }
        }
        grad
    }

    /// `RSS = y'y - 2 beta'X'y + beta'X'X beta`, evaluated from a current gradient.
    pub fn rss_from_gradient(&self, beta: &[T], grad: &[T]) -> T {
        // beta'X'X beta = beta'(X'y - grad)
        let mut rss = self.yty;
        for ((&b, &c), &g) in beta.iter().zip(&self.xty).zip(grad) {
            if b != T::zero() {
                rss += -b * c - b * g;
            }
        }
        rss.max(T::zero())
    }
}
