//! Shared domain vocabulary: zones, the feature catalog, the dataset matrix
//! and importance reports.

mod catalog;
mod importance;
mod matrix;
mod zone;

pub use catalog::{
    catalog_default, FeatureCatalog, FeatureGroup, FeatureKind, FeatureSpec, Outcome, AUX_COLUMNS, CATALOG_VERSION,
};
pub use importance::{ImportanceReport, Scope};
pub use matrix::{validate_matrix, FeatureMatrix, Rule, Violation, AUX_FILE, MASK_FILE, MATRIX_FILE};
pub use zone::{Ring, StateCode, ZoneCode, ZoneId, ZonePolygon};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid zone code `{0}`")]
    InvalidZone(String),
    #[error("invalid state code `{0}`")]
    InvalidState(String),
    #[error("zone {zone}: ring has {vertices} vertices, need at least 4")]
    DegenerateRing { zone: ZoneCode, vertices: usize },
    #[error("zone {0}: ring is not closed")]
    OpenRing(ZoneCode),
    #[error("zone {0}: non-finite coordinate")]
    NonFiniteCoordinate(ZoneCode),
    #[error("zone {0}: land area must be a nonnegative finite number")]
    NegativeArea(ZoneCode),
    #[error("matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
