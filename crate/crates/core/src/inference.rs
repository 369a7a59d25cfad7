//! Approximate standard errors for the selected coefficients and eigenvalue
//! diagnostics of the design.

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Cholesky, Matrix};
use crate::scalar::{dot, Scalar};
use crate::solvers::{residual_sum_of_squares, FitResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StdErrReport<T> {
    /// `RSS / (n - k)`
    pub sigma_hat_sq: T,
    /// One entry per selected covariate, in the order of `selected`.
    pub se: Vec<T>,
    pub selected: Vec<usize>,
    pub df_used: usize,
}

/// `se_j = sigma_hat sqrt((Sigma_1^{-1})_jj) / sqrt(n)` with
/// `Sigma_1 = X_1'X_1 / n` over the nonzero coefficients of `fit`.
pub fn standard_errors<T: Scalar>(
    data: &Dataset<T>,
    fit: &FitResult<T>,
) -> Result<StdErrReport<T>> {
    let selected = fit.coefficients.nonzero_indices.clone();
    if selected.is_empty() {
        return Err(Error::NoSelection);
    }
    let n = data.n();
    if selected.len() >= n {
        return Err(Error::TooManySelected {
            selected: selected.len(),
            n,
        });
    }
    let nf = T::from_usize(n).unwrap();
    let df = n - selected.len();
    let rss = residual_sum_of_squares(data, fit.values())?;
    let sigma_hat_sq = rss / T::from_usize(df).unwrap();

    let mut sigma1 = data.x().select_columns(&selected).gram();
    sigma1.scale(T::one() / nf);
    let chol = Cholesky::new(&sigma1).map_err(|_| Error::SingularSelectedGram)?;
    let sigma_hat = sigma_hat_sq.sqrt();
    let root_n = nf.sqrt();
    let se = chol
        .inverse_diagonal()
        .into_iter()
        .map(|d| sigma_hat * d.sqrt() / root_n)
        .collect();
    Ok(StdErrReport {
        sigma_hat_sq,
        se,
        selected,
        df_used: df,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenDiagnostics<T> {
    /// Extreme eigenvalues of `X'X / n`.
    pub rho_min: T,
    pub rho_max: T,
    /// Extreme eigenvalues of `X_1'X_1 / n`; absent for an empty selection.
    pub tau_min: Option<T>,
    pub tau_max: Option<T>,
    /// `max |X_j'X_k| / sqrt(n)` over unselected `j` and selected `k`.
    pub cross_max: T,
}

pub fn eigen_diagnostics<T: Scalar>(
    data: &Dataset<T>,
    selected: &[usize],
) -> Result<EigenDiagnostics<T>> {
    let x = data.x();
    let n = data.n();
    let p = data.p();
    if let Some(&bad) = selected.iter().find(|&&j| j >= p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: bad + 1,
        });
    }
    let nf = T::from_usize(n).unwrap();
    let (rho_min, rho_max) = extreme_eigenvalues(x, nf)?;
    let (tau_min, tau_max) = if selected.is_empty() {
        (None, None)
    } else {
        let (lo, hi) = extreme_eigenvalues(&x.select_columns(selected), nf)?;
        (Some(lo), Some(hi))
    };
    let mut in_set = vec![false; p];
    for &k in selected {
        in_set[k] = true;
    }
    let root_n = nf.sqrt();
    let mut cross_max = T::zero();
    for j in (0..p).filter(|&j| !in_set[j]) {
        for &k in selected {
            cross_max = cross_max.max(dot(x.column(j), x.column(k)).abs() / root_n);
        }
    }
    Ok(EigenDiagnostics {
        rho_min,
        rho_max,
        tau_min,
        tau_max,
        cross_max,
    })
}

/// Smallest and largest eigenvalue of `X'X / n`. When `p > n` the smaller
/// `n x n` matrix `XX' / n` is decomposed and the missing eigenvalues are zero.
fn extreme_eigenvalues<T: Scalar>(x: &Matrix<T>, nf: T) -> Result<(T, T)> {
    let wide = x.ncols() > x.nrows();
    let mut g = if wide { x.transpose().gram() } else { x.gram() };
    g.scale(T::one() / nf);
    let ev = symmetric_eigenvalues(&g)?;
    let lo = if wide { T::zero() } else { ev[0] };
    Ok((lo.min(ev[0]), *ev.last().unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{standardize, CoefficientPartition};
    use crate::solvers::{ols_fit, Method};
    use approx::assert_abs_diff_eq;

    fn hadamard_8() -> Vec<[f64; 3]> {
        (0..8)
            .map(|i| {
                let s = |b: usize| if (i >> b) & 1 == 0 { 1.0 } else { -1.0 };
                [s(0), s(1), s(2)]
            })
            .collect()
    }

    fn fit_with(values: Vec<f64>) -> FitResult<f64> {
        FitResult {
            coefficients: CoefficientPartition::from_values(values),
            iterations: 0,
            converged: true,
            objective: 0.0,
            method: Method::Ols,
            warnings: Vec::new(),
        }
    }

    #[test]
    fn identity_gram_gives_sigma_over_root_n() {
        let rows = hadamard_8();
        // Residual vector orthogonal to every column with sum of squares n - k.
        let resid: Vec<f64> = rows
            .iter()
            .map(|r| r[0] * r[1] * r[2] * (5.0f64 / 8.0).sqrt())
            .collect();
        let beta = [0.5, -1.0, 2.0];
        let y = rows
            .iter()
            .zip(&resid)
            .map(|(r, e)| r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + e)
            .collect();
        let d = Dataset::from_rows(&rows, y).unwrap();
        let report = standard_errors(&d, &fit_with(beta.to_vec())).unwrap();
        assert_abs_diff_eq!(report.sigma_hat_sq, 1.0, epsilon = 1e-12);
        for se in &report.se {
            assert_abs_diff_eq!(*se, 1.0 / 8.0f64.sqrt(), epsilon = 1e-12);
        }
        assert_eq!(report.df_used, 5);
    }

    #[test]
    fn single_column_se() {
        let raw: Dataset<f64> =
            Dataset::from_rows(&[[1.0], [2.0], [4.0], [7.0]], vec![1.0, 3.0, 2.0, 6.0]).unwrap();
        let d = standardize(&raw).unwrap();
        let fit = ols_fit(&d).unwrap();
        let r = standard_errors(&d, &fit).unwrap();
        assert_abs_diff_eq!(r.se[0], r.sigma_hat_sq.sqrt() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_selection_is_an_error() {
        let d = Dataset::from_rows(&[[1.0], [2.0]], vec![1.0, 3.0]).unwrap();
        assert_eq!(
            standard_errors(&d, &fit_with(vec![0.0])).unwrap_err(),
            Error::NoSelection
        );
    }

    #[test]
    fn orthonormal_eigenvalues_are_one() {
        let d = Dataset::from_rows(&hadamard_8(), vec![0.0; 8]).unwrap();
        let e = eigen_diagnostics(&d, &[0, 2]).unwrap();
        assert_abs_diff_eq!(e.rho_min, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.rho_max, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.tau_min.unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.cross_max, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wide_design_is_rank_deficient() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                (0..9)
                    .map(|j| ((i * 7 + j * 3) % 11) as f64 + 0.1 * j as f64)
                    .collect()
            })
            .collect();
        let d = standardize(&Dataset::from_rows(&rows, vec![1.0, 2.0, 0.0, -1.0, 3.0]).unwrap())
            .unwrap();
        let e = eigen_diagnostics(&d, &[]).unwrap();
        assert!(e.rho_min.abs() < 1e-8);
        assert!(e.tau_min.is_none());
    }
}
