//! Variable construction: joins every source onto the zone universe and
//! produces the predictor matrix and its summaries.

mod build;
mod formulas;
mod summary;

pub use build::{
    build_matrix, BuildOptions, DropReason, EducationDenominator, JoinReport, SourceJoin, Sources, ZoneAccumulator,
    REQUIRED_LAG,
};
pub use formulas::{
    building_age_indicators, commute_shares, dedup_patents, per_1000, share, BuildingAge, CommuteShares,
};
pub use summary::{column_stats, summarize, ScopeSummary, VariableStats};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("population is zero")]
    ZeroPopulation,
    #[error("building year histogram is empty or incomplete")]
    EmptyHistogram,
    #[error("no census records; the census defines the zone universe")]
    NoCensus,
    #[error("outcome year must be {expected} years after the base year, got {found}")]
    LagMismatch { expected: i32, found: i32 },
}
