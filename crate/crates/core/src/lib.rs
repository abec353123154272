//! Local innovation determinants: zone-level feature construction from
//! census, patent, business and point-of-interest sources, and
//! seed-averaged random-forest importance ranking against lagged
//! innovation outcomes.
//!
//! The learner and geometry are generic over [`num::Scalar`]; the aliases
//! below fix the common instantiations.

pub mod config;
pub mod features;
pub mod ingest;
pub mod mlcore;
pub mod model;
pub mod num;
pub mod pipeline;
pub mod report;
pub mod spatial;

pub use model::{catalog_default, FeatureCatalog, FeatureMatrix, ImportanceReport, Outcome, Scope, ZoneId};

/// Exact rational used for oracle-grade checks.
pub type Rational = num_rational::Ratio<i128>;

pub type Forest = mlcore::ForestModel<f64>;
pub type ForestF32 = mlcore::ForestModel<f32>;
pub type ExactForest = mlcore::ForestModel<Rational>;
pub type TrainingData = mlcore::Dataset<f64>;
pub type ExactData = mlcore::Dataset<Rational>;
