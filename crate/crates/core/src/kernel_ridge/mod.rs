//! Gram matrices of plain, group-averaged and weighted-set kernels, and kernel
//! ridge regression with the `(1/n)`-normalized loss, i.e. `(K + nλI)α = y`.

mod gram;
mod krr;
mod spectral;

use thiserror::Error;

pub use crate::datagen::Dataset;
pub use gram::{
    gram_assemble, gram_self, GramBudget, GramMatrix, KernelSpec, KernelSpecMeta, WARN_EVALUATIONS,
};
pub use krr::{
    default_lambda_grid, krr_fit, lambda_sweep, lambda_sweep_gram, log_grid, mean_squared_error,
    mse_risk, predict_from_gram, solve_dual, DualSolution, KrrModel, KrrModelFile, SweepResult,
    JITTER_LADDER,
};
pub use spectral::{approximation_error, shell_counts};

#[derive(Debug, Error)]
pub enum KrrError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("compute budget exceeded: {evaluations} kernel evaluations > cap {cap}")]
    BudgetExceeded { evaluations: u64, cap: u64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
