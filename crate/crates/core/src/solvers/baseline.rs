use crate::data::{CoefficientPartition, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::scalar::Scalar;

use super::{residual_sum_of_squares, FitResult, Method};

/// Ordinary least squares through the normal equations.
pub fn ols_fit<T: Scalar>(data: &Dataset<T>) -> Result<FitResult<T>> {
    if data.p() > data.n() {
        return Err(Error::SingularDesign);
    }
    let beta = solve_regularized(data.x(), data.y(), T::zero())?;
    let objective = residual_sum_of_squares(data, &beta)?;
    Ok(closed_form(beta, objective, Method::Ols))
}

/// Ridge regression `(X'X + lambda I)^{-1} X'y`.
///
/// For `p > n` and `lambda > 0` the equivalent `n x n` system
/// `beta = X'(XX' + lambda I)^{-1} y` is solved instead.
pub fn ridge_fit<T: Scalar>(data: &Dataset<T>, lambda: T) -> Result<FitResult<T>> {
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidPenalty(format!("ridge lambda = {lambda}")));
    }
    let beta = if data.p() > data.n() {
        if lambda == T::zero() {
            return Err(Error::SingularDesign);
        }
        let x = data.x();
        let xt = x.transpose();
        let mut k = xt.gram();
        for i in 0..data.n() {
            k[(i, i)] += lambda;
        }
        let alpha = Cholesky::new(&k)?.solve(data.y());
        x.tr_mul_vec(&alpha)
    } else {
        solve_regularized(data.x(), data.y(), lambda)?
    };
    let ridge: T = beta.iter().map(|&b| b * b).sum();
    let objective = residual_sum_of_squares(data, &beta)? + lambda * ridge;
    Ok(closed_form(beta, objective, Method::Ridge))
}

fn solve_regularized<T: Scalar>(x: &Matrix<T>, y: &[T], lambda: T) -> Result<Vec<T>> {
    let mut g = x.gram();
    for j in 0..g.ncols() {
        g[(j, j)] += lambda;
    }
    Ok(Cholesky::new(&g)?.solve(&x.tr_mul_vec(y)))
}

fn closed_form<T: Scalar>(beta: Vec<T>, objective: T, method: Method) -> FitResult<T> {
    FitResult {
        coefficients: CoefficientPartition::from_values(beta),
        iterations: 0,
        converged: true,
        objective,
        method,
        warnings: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::standardize;
    use approx::assert_abs_diff_eq;

    #[test]
    fn orthogonal_design_gives_scaled_projection() {
        // Columns of a 4x4 Hadamard matrix: X'X = 4 I.
        let rows = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0],
            [1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0],
        ];
        let y = vec![3.0, -1.0, 2.0, 0.5];
        let d = Dataset::from_rows(&rows, y.clone()).unwrap();
        let fit = ols_fit(&d).unwrap();
        let xty = d.x().tr_mul_vec(&y);
        for (b, c) in fit.values().iter().zip(&xty) {
            assert_abs_diff_eq!(*b, c / 4.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn square_full_rank_interpolates() {
        let rows = [[2.0, 0.5, -1.0], [0.3, 1.0, 0.7], [-1.2, 0.4, 2.0]];
        let y = vec![1.0, -0.5, 3.0];
        let d = Dataset::from_rows(&rows, y.clone()).unwrap();
        let fit = ols_fit(&d).unwrap();
        let fitted = d.x().mul_vec(fit.values());
        for (f, t) in fitted.iter().zip(&y) {
            assert_abs_diff_eq!(*f, *t, epsilon = 1e-8);
        }
    }

    #[test]
    fn ols_singular_and_wide_designs_fail() {
        let d =
            Dataset::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(ols_fit(&d).unwrap_err(), Error::SingularDesign);
        let wide = Dataset::from_rows(&[[1.0, 2.0, 0.0], [0.0, 1.0, 1.0]], vec![1.0, 2.0]).unwrap();
        assert_eq!(ols_fit(&wide).unwrap_err(), Error::SingularDesign);
    }

    #[test]
    fn ridge_scalar_closed_form() {
        // One standardised covariate with n = 4 and X'y = 8.
        let d = Dataset::from_rows(&[[1.0], [-1.0], [1.0], [-1.0]], vec![2.0, -2.0, 2.0, -2.0])
            .unwrap();
        let fit = ridge_fit(&d, 4.0).unwrap();
        assert_abs_diff_eq!(fit.values()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn ridge_zero_lambda_matches_ols_and_large_lambda_shrinks() {
        let raw = Dataset::from_rows(
            &[
                [0.1, 1.2],
                [2.0, -0.4],
                [-1.3, 0.3],
                [0.8, 0.8],
                [1.7, -2.1],
                [-0.2, 0.0],
            ],
            vec![1.0, 2.5, -1.0, 0.3, 2.2, -0.8],
        )
        .unwrap();
        let d = standardize(&raw).unwrap();
        let ols = ols_fit(&d).unwrap();
        let r0 = ridge_fit(&d, 0.0).unwrap();
        for (a, b) in ols.values().iter().zip(r0.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
        let big = ridge_fit(&d, 1e12).unwrap();
        let norm: f64 = big.values().iter().map(|b| b * b).sum::<f64>().sqrt();
        assert!(norm <= 1e-6);
    }

    #[test]
    fn ridge_wide_design_uses_dual_form() {
        let d = Dataset::from_rows(
            &[
                [1.0, 0.5, -0.3, 2.0],
                [0.2, -1.0, 0.7, 0.1],
                [-0.4, 0.3, 1.5, -1.0],
            ],
            vec![1.0, -0.5, 0.8],
        )
        .unwrap();
        let lambda = 0.7;
        let fit = ridge_fit(&d, lambda).unwrap();
        // Normal equations (X'X + lambda I) beta = X'y must hold.
        let mut g = d.x().gram();
        for j in 0..4 {
            g[(j, j)] += lambda;
        }
        let lhs = g.mul_vec(fit.values());
        let rhs = d.x().tr_mul_vec(d.y());
        for (a, b) in lhs.iter().zip(&rhs) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
        assert_eq!(ridge_fit(&d, 0.0).unwrap_err(), Error::SingularDesign);
    }
}
