//! Human-facing artifacts: summary and importance tables, choropleth
//! GeoJSON and the run manifest every artifact points back to.

mod geojson;
mod manifest;
mod tables;

pub use geojson::{column_values, emit_choropleth, quantile_bins, QUANTILE_BINS};
pub use manifest::{file_digest, source_date_epoch, RunManifest};
pub use tables::{emit_importance_table, emit_seed_table, emit_summary_table};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("importance report for {0} is degenerate (no split reduced impurity)")]
    DegenerateReport(String),
    #[error("reports for {0} do not share features and outcome")]
    Mismatch(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
}
