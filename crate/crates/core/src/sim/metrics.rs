use serde::Serialize;

use crate::data::{predict, Dataset, Standardization};
use crate::error::{Error, Result};
use crate::solvers::{check_len, FitResult};

/// Mean squared prediction error of `fit` on raw-scale `test` data, with test
/// rows mapped through the training transform `offsets`.
pub fn pmse(
    fit: &FitResult<f64>,
    offsets: &Standardization<f64>,
    test: &Dataset<f64>,
) -> Result<f64> {
    check_len(offsets.p(), test.p())?;
    let beta = fit.values();
    let x = test.x();
    let mut row = vec![0.0; test.p()];
    let mut total = 0.0;
    for (i, &y) in test.y().iter().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = x[(i, j)];
        }
        let r = y - predict(&row, beta, offsets)?;
        total += r * r;
    }
    Ok(total / test.n() as f64)
}

/// `sum_j (beta_hat_j - beta0_j)^2`
pub fn emse(beta_hat: &[f64], beta0: &[f64]) -> Result<f64> {
    check_len(beta0.len(), beta_hat.len())?;
    Ok(beta_hat
        .iter()
        .zip(beta0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectionStats {
    pub n_selected: usize,
    /// `correct[j]` iff the fit and the truth agree on whether `j` is zero.
    pub correct: Vec<bool>,
}

pub fn selection_stats(fit: &FitResult<f64>, beta0: &[f64]) -> Result<SelectionStats> {
    check_len(beta0.len(), fit.values().len())?;
    let correct = fit
        .values()
        .iter()
        .zip(beta0)
        .map(|(&b, &t)| (b != 0.0) == (t != 0.0))
        .collect();
    Ok(SelectionStats {
        n_selected: fit.n_selected(),
        correct,
    })
}

/// Lower median: element `(N - 1) / 2` of the sorted sample.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidSpec("median of an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v[(v.len() - 1) / 2])
}

/// Sample standard deviation with the `1/(N-1)` convention; `None` for `N < 2`.
pub fn sample_sd(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Some((ss / (n - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{standardize, CoefficientPartition};
    use crate::solvers::Method;

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
    fn emse_examples() {
        let b0 = [1.0, 0.0, -2.0];
        assert_eq!(emse(&b0, &b0).unwrap(), 0.0);
        assert_eq!(emse(&[2.0, 0.0, -2.0], &b0).unwrap(), 1.0);
        assert!(emse(&[1.0], &b0).is_err());
    }

    #[test]
    fn selection_examples() {
        let mut b0 = vec![1.0; 15];
        b0.extend(vec![0.0; 15]);
        let same = selection_stats(&fit_with(b0.iter().map(|b| b * 3.0).collect()), &b0).unwrap();
        assert!(same.correct.iter().all(|&c| c));
        let zero = selection_stats(&fit_with(vec![0.0; 30]), &b0).unwrap();
        assert_eq!(zero.correct.iter().filter(|&&c| c).count(), 15);
        assert_eq!(zero.n_selected, 0);
    }

    #[test]
    fn pmse_exact_and_null_models() {
        let raw = Dataset::from_rows(
            &[[1.0, 0.0], [2.0, 1.0], [4.0, -1.0], [5.0, 3.0]],
            vec![1.0, 2.0, 0.0, 5.0],
        )
        .unwrap();
        let train = standardize(&raw).unwrap();
        let t = train.standardization().unwrap();
        // Noise-free test responses generated from beta on the standardised scale.
        let beta = vec![0.7, -1.2];
        let test_x = [[3.0, 2.0], [0.0, -2.0], [6.0, 1.0]];
        let y: Vec<f64> = test_x
            .iter()
            .map(|r| predict(r, &beta, t).unwrap())
            .collect();
        let test = Dataset::from_rows(&test_x, y.clone()).unwrap();
        assert!(pmse(&fit_with(beta), t, &test).unwrap() < 1e-24);
        let null = pmse(&fit_with(vec![0.0, 0.0]), t, &test).unwrap();
        let expected = y.iter().map(|v| (v - t.y_mean).powi(2)).sum::<f64>() / 3.0;
        assert!((null - expected).abs() < 1e-12);
    }

    #[test]
    fn median_and_sd_conventions() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[5.0, 1.0, 3.0]).unwrap(), 3.0);
        assert!(median(&[]).is_err());
        assert_eq!(sample_sd(&[1.0]), None);
        assert!((sample_sd(&[1.0, 2.0, 3.0, 4.0]).unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
