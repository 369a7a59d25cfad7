//! Bridge-penalised linear regression.
//!
//! The core is generic over the floating-point type; [`Dataset64`] and the
//! other aliases below fix it to `f64` or `f32`.

pub mod data;
pub mod error;
pub mod inference;
pub mod linalg;
pub mod scalar;
pub mod screening;
pub mod sim;
pub mod solvers;

pub use data::{predict, standardize, CoefficientPartition, Dataset, PenaltySpec, Standardization};
pub use error::{Error, Result};
pub use inference::{eigen_diagnostics, standard_errors, EigenDiagnostics, StdErrReport};
pub use linalg::Matrix;
pub use scalar::Scalar;
pub use screening::{
    c_gamma, marginal_screen, two_step_fit, two_step_from_screen, univariate_argmin_is_zero,
    univariate_bridge_argmin, ScreenResult, SecondStage,
};
pub use solvers::{
    bridge_fit, enet_fit, lasso_fit, objective, ols_fit, ridge_fit, FitResult, FitWarning, Method,
    SolverConfig,
};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type Matrix64 = Matrix<f64>;
pub type PenaltySpec64 = PenaltySpec<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type FitResult64 = FitResult<f64>;
pub type ScreenResult64 = ScreenResult<f64>;
