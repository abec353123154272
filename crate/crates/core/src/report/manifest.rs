use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::mlcore::ForestParams;

/// Everything that determines a run's artifacts. It carries no wall-clock
/// time and no thread count, so equal inputs give an equal digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub catalog_version: String,
    /// SHA-256 per input source, keyed by source name.
    pub inputs: BTreeMap<String, String>,
    pub polygon_digest: String,
    pub states: Vec<String>,
    pub base_year: i32,
    pub outcome_year: i32,
    pub params: ForestParams,
    pub master_seed: u64,
    /// `SOURCE_DATE_EPOCH` when the caller pins one.
    pub source_date_epoch: Option<i64>,
    /// Effective configuration with defaults resolved.
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    /// SHA-256 of [`to_json`](Self::to_json).
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

pub fn file_digest(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

pub fn source_date_epoch() -> Option<i64> {
    std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()
}
