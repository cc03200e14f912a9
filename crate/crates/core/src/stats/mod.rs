//! Numerical core: Gaussians, EM-fitted mixtures with AIC selection, and
//! exact nearest-neighbor search.

mod gaussian;
mod gmm;
mod kdtree;
pub(crate) mod linalg;

use thiserror::Error;

pub use gaussian::{sample_gaussian, GaussianComponent};
pub use gmm::{aic, em_fit, n_params, select_best_gmm, EmConfig, GmmModel};
pub use kdtree::{nearest_neighbor, KdTree, Neighbor};
pub use linalg::min_eigenvalue;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("insufficient data: need {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("covariance is numerically singular")]
    Singular,

    #[error("no candidate mixture could be fitted")]
    FitFailed,

    #[error("nearest-neighbor query on an empty tree")]
    EmptyTree,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
