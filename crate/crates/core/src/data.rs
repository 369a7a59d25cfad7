//! Datasets, the centring/scaling transform and coefficient bookkeeping.
//!
//! Standardisation centres the response and every covariate column, then
//! scales each column to unit second moment using the `1/n` convention:
//! `sum_i x_ij = 0` and `(1/n) sum_i x_ij^2 = 1`. The transform is kept so
//! that raw-scale rows can be predicted with training statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Training-set means and `1/n` scales used to map raw rows onto the
/// standardised scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Standardization<T> {
    pub x_means: Vec<T>,
    pub x_scales: Vec<T>,
    pub y_mean: T,
}

impl<T: Scalar> Standardization<T> {
    pub fn identity(p: usize) -> Self {
        Self {
            x_means: vec![T::zero(); p],
            x_scales: vec![T::one(); p],
            y_mean: T::zero(),
        }
    }

    pub fn p(&self) -> usize {
        self.x_means.len()
    }

    /// Column means of the raw covariates followed by the raw response mean.
    pub fn centering_offsets(&self) -> Vec<T> {
        let mut v = self.x_means.clone();
        v.push(self.y_mean);
        v
    }

    pub fn transform_row(&self, row: &[T]) -> Result<Vec<T>> {
        if row.len() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(self.x_means.iter().zip(&self.x_scales))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect())
    }

    pub fn transform_matrix(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        if x.ncols() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: x.ncols(),
            });
        }
        let mut out = x.clone();
        for j in 0..x.ncols() {
            let (m, s) = (self.x_means[j], self.x_scales[j]);
            out.column_mut(j).iter_mut().for_each(|v| *v = (*v - m) / s);
        }
        Ok(out)
    }

    /// Transform equivalent to applying `self` and then `next`.
    fn then(&self, next: &Self) -> Self {
        let x_means = self
            .x_means
            .iter()
            .zip(&self.x_scales)
            .zip(&next.x_means)
            .map(|((&m1, &s1), &m2)| m1 + m2 * s1)
            .collect();
        let x_scales = self
            .x_scales
            .iter()
            .zip(&next.x_scales)
            .map(|(&s1, &s2)| s1 * s2)
            .collect();
        Self {
            x_means,
            x_scales,
            y_mean: self.y_mean + next.y_mean,
        }
    }
}

/// Design matrix plus response.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset<T> {
    x: Matrix<T>,
    y: Vec<T>,
    standardized: bool,
    /// Present once the dataset has been standardised; maps raw rows onto `x`.
    standardization: Option<Standardization<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(x: Matrix<T>, y: Vec<T>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::EmptyDesign);
        }
        if y.len() != x.nrows() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if !x.as_col_major().iter().chain(&y).all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self {
            x,
            y,
            standardized: false,
            standardization: None,
        })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R], y: Vec<T>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?, y)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn standardization(&self) -> Option<&Standardization<T>> {
        self.standardization.as_ref()
    }

    /// Offsets for prediction; the identity transform when never standardised.
    pub fn transform(&self) -> Standardization<T> {
        self.standardization
            .clone()
            .unwrap_or_else(|| Standardization::identity(self.p()))
    }

    /// Column means then response mean, `p + 1` values.
    pub fn centering_offsets(&self) -> Vec<T> {
        self.transform().centering_offsets()
    }

    /// Same standardisation state, restricted to the given columns.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let standardization = self.standardization.as_ref().map(|s| Standardization {
            x_means: idx.iter().map(|&j| s.x_means[j]).collect(),
            x_scales: idx.iter().map(|&j| s.x_scales[j]).collect(),
            y_mean: s.y_mean,
        });
        Self {
            x: self.x.select_columns(idx),
            y: self.y.clone(),
            standardized: self.standardized,
            standardization,
        }
    }

    pub fn with_response(&self, y: Vec<T>) -> Result<Self> {
        let mut out = Self::new(self.x.clone(), y)?;
        out.standardization = self.standardization.clone();
        Ok(out)
    }

    pub fn sum_sq_y(&self) -> T {
        self.y.iter().map(|&v| v * v).sum()
    }
}

/// Centres `y` and every column of `x`, scaling columns to unit `1/n` second moment.
///
/// Standardising an already standardised dataset composes the transforms so
/// that the recorded offsets always refer to the original raw scale.
pub fn standardize<T: Scalar>(raw: &Dataset<T>) -> Result<Dataset<T>> {
    let (n, p) = (raw.n(), raw.p());
    if n < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            found: n,
        });
    }
    let nf = T::from_usize(n).expect("row count fits the scalar type");
    let mut x = raw.x.clone();
    let mut x_means = Vec::with_capacity(p);
    let mut x_scales = Vec::with_capacity(p);
    for j in 0..p {
        let col = x.column_mut(j);
        if !col.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let mean = col.iter().copied().sum::<T>() / nf;
        col.iter_mut().for_each(|v| *v -= mean);
        let m2 = col.iter().map(|&v| v * v).sum::<T>() / nf;
        let floor = T::epsilon() * (T::one() + mean.abs());
        if !(m2.sqrt() > floor) {
            return Err(Error::ConstantColumn(j));
        }
        let scale = m2.sqrt();
        col.iter_mut().for_each(|v| *v /= scale);
        x_means.push(mean);
        x_scales.push(scale);
    }
    if !raw.y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let y_mean = raw.y.iter().copied().sum::<T>() / nf;
    let y = raw.y.iter().map(|&v| v - y_mean).collect();
    let step = Standardization {
        x_means,
        x_scales,
        y_mean,
    };
    let standardization = match &raw.standardization {
        Some(prev) => prev.then(&step),
        None => step,
    };
    Ok(Dataset {
        x,
        y,
        standardized: true,
        standardization: Some(standardization),
    })
}

/// Prediction for a raw-scale covariate row: `x~' beta + ybar`, where `x~` is
/// the row mapped through the training offsets and scales.
pub fn predict<T: Scalar>(
    x_new: &[T],
    coefficients: &[T],
    offsets: &Standardization<T>,
) -> Result<T> {
    if coefficients.len() != offsets.p() {
        return Err(Error::DimensionMismatch {
            expected: offsets.p(),
            found: coefficients.len(),
        });
    }
    let z = offsets.transform_row(x_new)?;
    Ok(z.iter()
        .zip(coefficients)
        .fold(offsets.y_mean, |acc, (&a, &b)| acc + a * b))
}

/// Penalty weight and exponent for the bridge family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenaltySpec<T> {
    pub lambda: T,
    pub gamma: T,
    /// Weight of the second-stage bridge refit in two-step estimation.
    pub second_stage_lambda: T,
}

impl<T: Scalar> PenaltySpec<T> {
    /// `gamma` must lie in `(0, 1]`, or equal 2 for ridge.
    pub fn new(lambda: T, gamma: T) -> Result<Self> {
        let spec = Self {
            lambda,
            gamma,
            second_stage_lambda: T::zero(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_second_stage(mut self, lambda: T) -> Result<Self> {
        self.second_stage_lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return Err(Error::InvalidPenalty(format!("lambda = {}", self.lambda)));
        }
        if !(self.second_stage_lambda >= T::zero()) || !self.second_stage_lambda.is_finite() {
            return Err(Error::InvalidPenalty(format!(
                "second-stage lambda = {}",
                self.second_stage_lambda
            )));
        }
        let g = self.gamma;
        let bridge_range = g > T::zero() && g <= T::one();
        if !(bridge_range || g == T::lit(2.0)) {
            return Err(Error::InvalidGamma(g.to_f64_lossy()));
        }
        Ok(())
    }
}

/// Coefficient vector split into estimated nonzero and zero index sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientPartition<T> {
    pub nonzero_indices: Vec<usize>,
    pub zero_indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Scalar> CoefficientPartition<T> {
    pub fn from_values(values: Vec<T>) -> Self {
        let (nonzero_indices, zero_indices) =
            (0..values.len()).partition(|&j| values[j] != T::zero());
        Self {
            nonzero_indices,
            zero_indices,
            values,
        }
    }

    pub fn zeros(p: usize) -> Self {
        Self::from_values(vec![T::zero(); p])
    }

    /// Scatters `sub` into a length-`p` vector at positions `idx`.
    pub fn embed(p: usize, idx: &[usize], sub: &[T]) -> Self {
        let mut values = vec![T::zero(); p];
        for (&j, &v) in idx.iter().zip(sub) {
            values[j] = v;
        }
        Self::from_values(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_nonzero(&self) -> usize {
        self.nonzero_indices.len()
    }
}
