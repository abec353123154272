//! CART regression trees and a random forest with mean-decrease-in-impurity
//! importance, generic over [`Scalar`](crate::num::Scalar).

mod dataset;
mod forest;
mod protocol;
pub mod rng;
mod split;
mod tree;

pub use dataset::Dataset;
pub use forest::{dump_forest, fit_forest, mdi_importance, predict, ForestModel, ForestParams, Importance};
pub use protocol::{seed_averaged, seed_averaged_importance, training_data, SeedRuns};
pub use split::{best_split, Split};
pub use tree::{fit_tree, Tree, TreeNode, TreeParams};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MlError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("too few complete rows: need {needed}, found {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("invalid forest parameters: {0}")]
    InvalidParams(String),
}
