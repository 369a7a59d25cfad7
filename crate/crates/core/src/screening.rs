//! Marginal bridge screening for `p` possibly much larger than `n`.
//!
//! Each covariate is judged on its own univariate bridge problem
//! `g(u) = u^2 - 2 a u + lambda |u|^gamma`, whose minimiser is exactly zero
//! iff `lambda > c_gamma |a|^(2 - gamma)`. No coefficient values are estimated
//! here; [`two_step_fit`] refits the selected covariates.

use serde::Serialize;

use crate::data::{CoefficientPartition, Dataset, PenaltySpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solvers::{bridge_fit, ols_fit, FitResult, FitWarning, Method, SolverConfig};

/// Threshold constant `c_gamma = (2/(2-gamma)) (2(1-gamma)/(2-gamma))^(1-gamma)`.
///
/// `c_1 = 2` (with `0^0 = 1`), matching the soft-threshold rule of the LASSO.
pub fn c_gamma<T: Scalar>(gamma: T) -> Result<T> {
    if !(gamma > T::zero() && gamma <= T::one()) {
        return Err(Error::InvalidGamma(gamma.to_f64_lossy()));
    }
    let two = T::lit(2.0);
    let lead = two / (two - gamma);
    if gamma == T::one() {
        return Ok(lead);
    }
    let base = two * (T::one() - gamma) / (two - gamma);
    Ok(lead * base.powf(T::one() - gamma))
}

/// True iff `g(u) = u^2 - 2au + lambda|u|^gamma` is minimised only at `u = 0`,
/// i.e. `lambda > c_gamma |a|^(2-gamma)`. At equality both zero and a nonzero
/// point minimise `g` and this returns `false`.
pub fn univariate_argmin_is_zero<T: Scalar>(a: T, lambda: T, gamma: T) -> bool {
    if a == T::zero() {
        return true;
    }
    let c = match c_gamma(gamma) {
        Ok(c) => c,
        Err(_) => return false,
    };
    lambda > c * a.abs().powf(T::lit(2.0) - gamma)
}

/// Global minimiser of `g(u) = u^2 - 2au + lambda|u|^gamma`, `0 < gamma <= 1`.
///
/// When the minimiser is nonzero it is the larger root of
/// `g'(u) = 2u - 2|a| + lambda gamma u^(gamma-1)` on the convex branch
/// `[u_inflection, |a|]`, found by Newton iteration from `|a|` (monotone there
/// since `g'` is increasing and convex) with a bisection safeguard.
pub fn univariate_bridge_argmin<T: Scalar>(a: T, lambda: T, gamma: T) -> T {
    if a == T::zero() {
        return T::zero();
    }
    if lambda <= T::zero() {
        return a;
    }
    let two = T::lit(2.0);
    let b = a.abs();
    let s = a.signum();
    if gamma >= T::one() {
        return s * (b - lambda / two).max(T::zero());
    }
    if univariate_argmin_is_zero(a, lambda, gamma) {
        return T::zero();
    }
    let one = T::one();
    let deriv = |u: T| two * u - two * b + lambda * gamma * u.powf(gamma - one);
    let curv = |u: T| two + lambda * gamma * (gamma - one) * u.powf(gamma - two);
    let mut lo = (lambda * gamma * (one - gamma) / two)
        .powf(one / (two - gamma))
        .min(b);
    let mut hi = b;
    let mut u = b;
    for _ in 0..200 {
        let d = deriv(u);
        if d > T::zero() {
            hi = u;
        } else {
            lo = u;
            if d == T::zero() {
                break;
            }
        }
        let c = curv(u);
        let mut next = if c > T::zero() {
            u - d / c
        } else {
            (lo + hi) / two
        };
        if !(next > lo && next < hi) {
            next = (lo + hi) / two;
        }
        if (next - u).abs() <= T::epsilon() * b * T::lit(4.0) {
            u = next;
            break;
        }
        u = next;
    }
    s * u
}

/// `g(u) = u^2 - 2au + lambda|u|^gamma`.
pub fn univariate_bridge_objective<T: Scalar>(u: T, a: T, lambda: T, gamma: T) -> T {
    let pen = if u == T::zero() {
        T::zero()
    } else {
        lambda * u.abs().powf(gamma)
    };
    u * u - T::lit(2.0) * a * u + pen
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreenResult<T> {
    /// `a_j = (1/n) sum_i y_i x_ij`
    pub marginal_stat: Vec<T>,
    /// `c_gamma |a_j|^(2-gamma)`
    pub threshold_rhs: Vec<T>,
    /// Covariates whose univariate minimiser is nonzero, ascending.
    pub selected: Vec<usize>,
    pub lambda_over_n: T,
    pub gamma: T,
}

impl<T: Scalar> ScreenResult<T> {
    pub fn is_selected(&self, j: usize) -> bool {
        self.selected.binary_search(&j).is_ok()
    }
}

/// Marginal bridge screen. `penalty.lambda` is the un-normalised weight; each
/// column's problem is divided by `n` (using `sum_i x_ij^2 = n`), so column `j`
/// is kept iff `lambda/n <= c_gamma |a_j|^(2-gamma)` and `a_j != 0`.
pub fn marginal_screen<T: Scalar>(
    data: &Dataset<T>,
    penalty: &PenaltySpec<T>,
) -> Result<ScreenResult<T>> {
    if !data.is_standardized() {
        return Err(Error::NotStandardized);
    }
    penalty.validate()?;
    let gamma = penalty.gamma;
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(Error::InvalidGamma(gamma.to_f64_lossy()));
    }
    let c = c_gamma(gamma)?;
    let nf = T::from_usize(data.n()).unwrap();
    let lambda_over_n = penalty.lambda / nf;
    let expo = T::lit(2.0) - gamma;
    let marginal_stat: Vec<T> = data
        .x()
        .tr_mul_vec(data.y())
        .into_iter()
        .map(|v| v / nf)
        .collect();
    let threshold_rhs: Vec<T> = marginal_stat
        .iter()
        .map(|a| c * a.abs().powf(expo))
        .collect();
    let selected = marginal_stat
        .iter()
        .zip(&threshold_rhs)
        .enumerate()
        .filter(|(_, (a, rhs))| **a != T::zero() && lambda_over_n <= **rhs)
        .map(|(j, _)| j)
        .collect();
    Ok(ScreenResult {
        marginal_stat,
        threshold_rhs,
        selected,
        lambda_over_n,
        gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SecondStage {
    Ols,
    Bridge,
}

/// Screens with `screen_penalty`, then refits the selected covariates by OLS or
/// by bridge with `second_penalty` (ignored for OLS). Coefficients outside the
/// screened set are exactly zero.
pub fn two_step_fit<T: Scalar>(
    data: &Dataset<T>,
    screen_penalty: &PenaltySpec<T>,
    stage: SecondStage,
    second_penalty: &PenaltySpec<T>,
    config: &SolverConfig<T>,
) -> Result<FitResult<T>> {
    let screen = marginal_screen(data, screen_penalty)?;
    two_step_from_screen(data, &screen, stage, second_penalty, config)
}

/// Second stage of [`two_step_fit`] for a screen that has already been computed.
pub fn two_step_from_screen<T: Scalar>(
    data: &Dataset<T>,
    screen: &ScreenResult<T>,
    stage: SecondStage,
    second_penalty: &PenaltySpec<T>,
    config: &SolverConfig<T>,
) -> Result<FitResult<T>> {
    let p = data.p();
    let selected = &screen.selected;
    if selected.is_empty() {
        return Ok(FitResult {
            coefficients: CoefficientPartition::zeros(p),
            iterations: 0,
            converged: true,
            objective: data.sum_sq_y(),
            method: match stage {
                SecondStage::Ols => Method::Ols,
                SecondStage::Bridge => Method::Bridge,
            },
            warnings: vec![FitWarning::EmptySelection],
        });
    }
    let sub = data.select_columns(selected);
    let inner = match stage {
        SecondStage::Ols => {
            if selected.len() >= data.n() {
                return Err(Error::TooManySelected {
                    selected: selected.len(),
                    n: data.n(),
                });
            }
            ols_fit(&sub)?
        }
        SecondStage::Bridge => bridge_fit(&sub, second_penalty, config)?,
    };
    Ok(FitResult {
        coefficients: CoefficientPartition::embed(p, selected, inner.values()),
        ..inner
    })
}
