//! Cyclic coordinate descent with soft thresholding for
//! `RSS + lambda1 ||b||_1 + lambda2 ||b||_2^2`.

use crate::data::{CoefficientPartition, Dataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Design, FitResult, Method, SolverConfig};

/// KKT residuals are driven below this multiple of `tol * n`.
const KKT_FACTOR: f64 = 1e-3;

#[inline]
pub(crate) fn soft_threshold<T: Scalar>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

pub fn lasso_fit<T: Scalar>(
    data: &Dataset<T>,
    lambda: T,
    config: &SolverConfig<T>,
) -> Result<FitResult<T>> {
    coordinate_descent(data, lambda, T::zero(), config, Method::Lasso)
}

pub fn enet_fit<T: Scalar>(
    data: &Dataset<T>,
    lambda1: T,
    lambda2: T,
    config: &SolverConfig<T>,
) -> Result<FitResult<T>> {
    coordinate_descent(data, lambda1, lambda2, config, Method::Enet)
}

fn coordinate_descent<T: Scalar>(
    data: &Dataset<T>,
    l1: T,
    l2: T,
    config: &SolverConfig<T>,
    method: Method,
) -> Result<FitResult<T>> {
    config.validate()?;
    for (name, v) in [("lambda1", l1), ("lambda2", l2)] {
        if !(v >= T::zero()) || !v.is_finite() {
            return Err(Error::InvalidPenalty(format!("{name} = {v}")));
        }
    }
    let p = data.p();
    let two = T::lit(2.0);
    let half_l1 = l1 / two;
    let kkt_tol = T::lit(KKT_FACTOR) * config.tol * T::from_usize(data.n()).unwrap();

    let mut design = Design::new(data);
    let mut beta = vec![T::zero(); p];
    // grad = X'(y - X beta)
    let mut grad = design.xty.clone();
    let mut sweeps = 0;
    let mut converged = false;

    // Full sweeps alternate with passes over the current support only; a
    // full sweep that changes nothing beyond `tol` ends the fit.
    let mut full = true;
    while sweeps < config.max_iter {
        sweeps += 1;
        let mut max_change = T::zero();
        for j in 0..p {
            let a = design.diag[j];
            if a == T::zero() || (!full && beta[j] == T::zero()) {
                continue;
            }
            let z = grad[j] + a * beta[j];
            let new = soft_threshold(z, half_l1) / (a + l2);
            let delta = new - beta[j];
            if delta != T::zero() {
                beta[j] = new;
                design.update_gradient(&mut grad, j, delta);
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change <= config.tol {
            if full && kkt_violation(&beta, &grad, l1, l2) <= kkt_tol {
                converged = true;
                break;
            }
            full = !full;
        } else if full {
            full = false;
        }
        // Periodic refresh guards against drift in the incremental gradient.
        if sweeps % 500 == 0 {
            grad = design.gradient(&beta);
        }
    }

    let rss = design.rss_from_gradient(&beta, &grad);
    let (n1, n2) = beta.iter().fold((T::zero(), T::zero()), |(a, b), &v| {
        (a + v.abs(), b + v * v)
    });
    Ok(FitResult {
        coefficients: CoefficientPartition::from_values(beta),
        iterations: sweeps,
        converged,
        objective: rss + l1 * n1 + l2 * n2,
        method,
        warnings: Vec::new(),
    })
}

/// Largest violation of the stationarity conditions of
/// `RSS + l1 |b|_1 + l2 |b|^2`, in the units of `2 X'(y - Xb)`.
pub(crate) fn kkt_violation<T: Scalar>(beta: &[T], grad: &[T], l1: T, l2: T) -> T {
    let two = T::lit(2.0);
    beta.iter().zip(grad).fold(T::zero(), |m, (&b, &g)| {
        let v = if b != T::zero() {
            (two * g - two * l2 * b - l1 * b.signum()).abs()
        } else {
            ((two * g).abs() - l1).max(T::zero())
        };
        m.max(v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::standardize;
    use crate::solvers::{ols_fit, ridge_fit};
    use approx::assert_abs_diff_eq;

    fn one_column(n: usize, a: f64) -> Dataset<f64> {
        // Alternating +-1 column (unit second moment) with X'y / n = a.
        let rows: Vec<[f64; 1]> = (0..n)
            .map(|i| [if i % 2 == 0 { 1.0 } else { -1.0 }])
            .collect();
        let y = rows.iter().map(|r| a * r[0]).collect();
        Dataset::from_rows(&rows, y).unwrap()
    }

    fn sample() -> Dataset<f64> {
        let raw = Dataset::from_rows(
            &[
                [0.1, 1.2, -0.5],
                [2.0, -0.4, 0.3],
                [-1.3, 0.3, 1.1],
                [0.8, 0.8, -0.2],
                [1.7, -2.1, 0.9],
                [-0.2, 0.0, -1.4],
                [0.5, 1.5, 0.6],
                [-0.9, -0.7, 0.1],
            ],
            vec![1.0, 2.5, -1.0, 0.3, 2.2, -0.8, 1.1, -1.9],
        )
        .unwrap();
        standardize(&raw).unwrap()
    }

    #[test]
    fn scalar_soft_threshold_case() {
        let d = one_column(10, 1.0);
        let fit = lasso_fit(&d, 10.0, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(fit.values()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn lambda_above_max_correlation_zeroes_everything() {
        let d = sample();
        let n = d.n() as f64;
        let xty = d.x().tr_mul_vec(d.y());
        let max = xty.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let fit = lasso_fit(&d, 2.0 * max * 1.0000001, &SolverConfig::default()).unwrap();
        assert!(fit.values().iter().all(|&b| b == 0.0));
        assert!(2.0 * max / n > 0.0);
    }

    #[test]
    fn zero_lambda_recovers_ols() {
        let d = sample();
        let lasso = lasso_fit(&d, 0.0, &SolverConfig::default()).unwrap();
        let ols = ols_fit(&d).unwrap();
        for (a, b) in lasso.values().iter().zip(ols.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-6);
        }
    }

    #[test]
    fn enet_scalar_closed_form() {
        let d = one_column(10, 1.0);
        let fit = enet_fit(&d, 10.0, 10.0, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(fit.values()[0], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn enet_limits() {
        let d = sample();
        let cfg = SolverConfig::default();
        let pure_ridge = enet_fit(&d, 0.0, 3.0, &cfg).unwrap();
        let ridge = ridge_fit(&d, 3.0).unwrap();
        for (a, b) in pure_ridge.values().iter().zip(ridge.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-6);
        }
        let pure_lasso = enet_fit(&d, 2.0, 0.0, &cfg).unwrap();
        let lasso = lasso_fit(&d, 2.0, &cfg).unwrap();
        for (a, b) in pure_lasso.values().iter().zip(lasso.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-6);
        }
    }

    #[test]
    fn lasso_kkt_holds() {
        let d = sample();
        let n = d.n() as f64;
        for lambda in [0.1, 1.0, 4.0, 9.0] {
            let fit = lasso_fit(&d, lambda, &SolverConfig::default()).unwrap();
            assert!(fit.converged);
            let r: Vec<f64> = d
                .y()
                .iter()
                .zip(d.x().mul_vec(fit.values()))
                .map(|(y, f)| y - f)
                .collect();
            let g = d.x().tr_mul_vec(&r);
            for (b, gj) in fit.values().iter().zip(&g) {
                if *b != 0.0 {
                    assert!((2.0 * gj - lambda * b.signum()).abs() <= 1e-6 * n);
                } else {
                    assert!((2.0 * gj).abs() <= lambda + 1e-6 * n);
                }
            }
        }
    }

    #[test]
    fn negative_penalty_is_rejected() {
        let d = sample();
        assert!(lasso_fit(&d, -1.0, &SolverConfig::default()).is_err());
        assert!(enet_fit(&d, 1.0, -1.0, &SolverConfig::default()).is_err());
    }
}
