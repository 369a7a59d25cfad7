use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("column {0} has zero variance")]
    ConstantColumn(usize),
    #[error("input contains NaN or infinite values")]
    NonFiniteInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("at least {needed} rows are required, found {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("empty design: n and p must both be at least 1")]
    EmptyDesign,
    #[error("gamma {0} is outside the admissible range")]
    InvalidGamma(f64),
    #[error("invalid penalty: {0}")]
    InvalidPenalty(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("design matrix is singular or numerically rank deficient")]
    SingularDesign,
    #[error("solver did not converge within {0} iterations")]
    NotConverged(usize),
    #[error("dataset must be standardized first")]
    NotStandardized,
    #[error("{selected} covariates selected but only {n} observations available")]
    TooManySelected { selected: usize, n: usize },
    #[error("Gram matrix of the selected covariates is singular")]
    SingularSelectedGram,
    #[error("fit has no nonzero coefficients")]
    NoSelection,
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("empty tuning grid")]
    EmptyGrid,
    #[error("no grid value produced a usable fit")]
    TuningFailed,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
