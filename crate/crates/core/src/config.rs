//! Declarative run configuration, read from TOML.
//!
//! Relative paths resolve against the directory holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{BuildOptions, EducationDenominator, REQUIRED_LAG};
use crate::ingest::{CensusSchema, FetchMode, ParseOptions, PoiKind};
use crate::mlcore::ForestParams;
use crate::model::{catalog_default, Outcome, StateCode};
use crate::spatial::{DensityUnit, PolygonKeys};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("outcome_year - base_year must be {expected} (got {found}); pass --allow-custom-lag to override")]
    LagMismatch { expected: i32, found: i32 },
    #[error("source `{source_name}` points to {path}, which does not exist")]
    MissingPath { source_name: String, path: String },
    #[error("{0}")]
    Invalid(String),
}

/// Input file locations. `census`, `polygons`, `patents` and `sfr` are
/// required; the rest default to empty sources.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcePaths {
    pub census: Option<PathBuf>,
    pub polygons: Option<PathBuf>,
    pub patents: Option<PathBuf>,
    pub sfr: Option<PathBuf>,
    pub rnd: Option<PathBuf>,
    pub h1b: Option<PathBuf>,
    pub business: Option<PathBuf>,
    /// One newline-delimited JSON file per POI kind.
    #[serde(default)]
    pub poi: BTreeMap<PoiKind, PathBuf>,
}

/// Live POI retrieval for kinds without a file in `sources.poi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FetchConfig {
    /// `[min_lon, min_lat, max_lon, max_lat]`.
    pub bbox: [f64; 4],
    pub kinds: Vec<PoiKind>,
    #[serde(default)]
    pub mode: FetchMode,
    #[serde(default = "default_keywords")]
    pub keywords: Vec<String>,
    pub endpoint: Option<String>,
}

fn default_keywords() -> Vec<String> {
    crate::ingest::INNOVATION_KEYWORDS.iter().map(|s| s.to_string()).collect()
}

fn default_map_columns() -> Vec<String> {
    Outcome::ALL.iter().map(|o| o.column().to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub states: Vec<StateCode>,
    pub base_year: i32,
    pub outcome_year: i32,
    #[serde(default)]
    pub allow_custom_lag: bool,
    #[serde(default)]
    pub master_seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub density_unit: DensityUnit,
    #[serde(default)]
    pub education_denominator: EducationDenominator,
    #[serde(default)]
    pub h1b_certified_only: bool,
    pub sources: SourcePaths,
    #[serde(default)]
    pub forest: ForestParams,
    #[serde(default)]
    pub census_schema: CensusSchema,
    #[serde(default)]
    pub polygon_keys: PolygonKeys,
    #[serde(default)]
    pub parse: ParseOptions,
    #[serde(default = "default_map_columns")]
    pub map_columns: Vec<String>,
    pub fetch: Option<FetchConfig>,
    /// Directory the config was read from; relative paths resolve here.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig = toml::from_str(text)
            .map_err(|e| ConfigError::Parse { path: origin.to_string(), message: e.to_string() })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.display().to_string(), source: e })?;
        let base = path.parent().map_or_else(PathBuf::new, Path::to_path_buf);
        Self::from_toml(&text, &base, &path.display().to_string())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// `(source name, resolved path)` for every configured input, in a
    /// fixed order.
    pub fn input_paths(&self) -> Vec<(String, PathBuf)> {
        let s = &self.sources;
        let mut out = Vec::new();
        for (name, p) in [
            ("census", &s.census),
            ("polygons", &s.polygons),
            ("patents", &s.patents),
            ("sfr", &s.sfr),
            ("rnd", &s.rnd),
            ("h1b", &s.h1b),
            ("business", &s.business),
        ] {
            if let Some(p) = p {
                out.push((name.to_string(), self.resolve(p)));
            }
        }
        for (kind, p) in &s.poi {
            out.push((format!("poi.{kind}"), self.resolve(p)));
        }
        out
    }

    /// Every check that can fail before anything is written.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.states.is_empty() {
            return Err(ConfigError::Invalid("`states` must name at least one state".into()));
        }
        let found = self.outcome_year - self.base_year;
        if found != REQUIRED_LAG && !(self.allow_custom_lag && found > 0) {
            return Err(ConfigError::LagMismatch { expected: REQUIRED_LAG, found });
        }
        for (name, p) in [
            ("census", &self.sources.census),
            ("polygons", &self.sources.polygons),
            ("patents", &self.sources.patents),
            ("sfr", &self.sources.sfr),
        ] {
            if p.is_none() {
                return Err(ConfigError::Invalid(format!("sources.{name} is required")));
            }
        }
        for (name, path) in self.input_paths() {
            if !path.is_file() {
                return Err(ConfigError::MissingPath { source_name: name, path: path.display().to_string() });
            }
        }
        self.forest.validate(catalog_default().len()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        for col in &self.map_columns {
            let known = catalog_default().index_of(col).is_some()
                || Outcome::ALL.iter().any(|o| o.column() == col)
                || crate::model::AUX_COLUMNS.contains(&col.as_str());
            if !known {
                return Err(ConfigError::Invalid(format!("unknown map column `{col}`")));
            }
        }
        Ok(())
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            states: self.states.clone(),
            base_year: self.base_year,
            outcome_year: self.outcome_year,
            allow_custom_lag: self.allow_custom_lag,
            density_unit: self.density_unit,
            education_denominator: self.education_denominator,
            h1b_certified_only: self.h1b_certified_only,
            year_built: self.census_schema.year_built.clone(),
        }
    }
}
