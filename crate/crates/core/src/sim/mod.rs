//! Monte-Carlo comparison of the estimators on fixed Gaussian designs.
//!
//! The design is drawn once per seed; replicates redraw only the noise, each
//! from its own ChaCha stream, so reports are bit-reproducible regardless of
//! how many threads evaluate them.

pub mod bench;
pub mod metrics;
pub mod scenario;
pub mod tuning;

pub use bench::{
    run_benchmark, run_method, run_replicates, BenchConfig, BenchGrids, BenchMethod, MethodOutcome,
    MethodSummary, ReplicationReport,
};
pub use metrics::{emse, median, pmse, sample_sd, selection_stats, SelectionStats};
pub use scenario::{
    ar1_covariance, generate_scenario, Replicate, ScenarioDesign, ScenarioSpec, Structure,
};
pub use tuning::{default_grid, grid, tune_lambda, Fitter, Tuned};
