//! Stage orchestration. Each stage reads only what the previous stage
//! staged under the output directory:
//!
//! ```text
//! staging/*.jsonl            ingest
//! matrix/matrix*.tsv         build (plus join_report.txt)
//! tables/summary_*.tsv       summarize
//! importance/*.json          train (plus tables/importance_*.tsv)
//! maps/*.geojson             maps
//! manifest.json              every stage
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use log::{info, warn};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::features::{build_matrix, summarize, FeatureError, Sources};
use crate::ingest::{
    filter_to_states, parse_business, parse_census, parse_h1b, parse_patents, parse_poi, parse_rnd, parse_sfr,
    read_jsonl, write_jsonl, CachedFetcher, DateWindow, FetchMode, HttpTransport, IngestError, OfflineTransport,
    Parsed, PoiRecord, QuerySpec, Transport,
};
use crate::mlcore::{seed_averaged_importance, MlError};
use crate::model::{
    catalog_default, validate_matrix, FeatureCatalog, FeatureMatrix, ImportanceReport, ModelError, Outcome, Scope,
};
use crate::report::{
    emit_choropleth, emit_importance_table, emit_seed_table, emit_summary_table, file_digest, source_date_epoch,
    ReportError, RunManifest,
};
use crate::spatial::{read_polygons, PolygonSet, SpatialError, ZoneIndex};

pub const CACHE_DIR_ENV: &str = "LID_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Build,
    Summarize,
    Train,
    Maps,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Ingest, Stage::Build, Stage::Summarize, Stage::Train, Stage::Maps];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Build => "build",
            Stage::Summarize => "summarize",
            Stage::Train => "train",
            Stage::Maps => "maps",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: StageError,
}

trait StageContext<T> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<StageError>> StageContext<T> for Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError { stage, source: e.into() })
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StageError + '_ {
    move |source| StageError::Io { path: path.display().to_string(), source }
}

fn write_file(path: &Path, contents: &str) -> Result<(), StageError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

/// Which outcomes the train stage fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutcomeSelection {
    Patents,
    Sfr,
    #[default]
    Both,
}

impl OutcomeSelection {
    pub fn outcomes(self) -> Vec<Outcome> {
        match self {
            OutcomeSelection::Patents => vec![Outcome::Patents],
            OutcomeSelection::Sfr => vec![Outcome::Sfr],
            OutcomeSelection::Both => Outcome::ALL.to_vec(),
        }
    }
}

impl FromStr for OutcomeSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "both" => Ok(OutcomeSelection::Both),
            other => match other.parse::<Outcome>()? {
                Outcome::Patents => Ok(OutcomeSelection::Patents),
                Outcome::Sfr => Ok(OutcomeSelection::Sfr),
            },
        }
    }
}

/// A validated configuration bound to an output directory.
pub struct Pipeline {
    pub config: RunConfig,
    pub out: PathBuf,
    pub outcomes: OutcomeSelection,
    pub catalog: FeatureCatalog,
    manifest: RunManifest,
    digest: String,
}

impl Pipeline {
    /// Validates the configuration and digests every input. Nothing is
    /// written until a stage runs.
    pub fn new(config: RunConfig, out: PathBuf, outcomes: OutcomeSelection) -> Result<Self, PipelineError> {
        let pre = Stage::Ingest;
        config.validate().stage(pre)?;
        if !config.parse.delimiter.is_ascii() {
            return Err(StageError::Invalid("parse.delimiter must be a single ASCII character".into())).stage(pre);
        }
        let catalog = catalog_default();
        let mut inputs = std::collections::BTreeMap::new();
        let mut polygon_digest = String::new();
        for (name, path) in config.input_paths() {
            let d = file_digest(&path).map_err(io_err(&path)).stage(pre)?;
            if name == "polygons" {
                polygon_digest = d.clone();
            }
            inputs.insert(name, d);
        }
        let echo = serde_json::to_value(&config).map_err(|e| StageError::Invalid(e.to_string())).stage(pre)?;
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            catalog_version: catalog.version().to_string(),
            inputs,
            polygon_digest,
            states: config.states.iter().map(|s| s.to_string()).collect(),
            base_year: config.base_year,
            outcome_year: config.outcome_year,
            params: config.forest,
            master_seed: config.master_seed,
            source_date_epoch: source_date_epoch(),
            config: echo,
        };
        let digest = manifest.digest();
        Ok(Self { config, out, outcomes, catalog, manifest, digest })
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    pub fn manifest_digest(&self) -> &str {
        &self.digest
    }

    pub fn scopes(&self) -> Vec<Scope> {
        Scope::standard_set(&self.config.states)
    }

    fn staging(&self) -> PathBuf {
        self.out.join("staging")
    }

    fn matrix_dir(&self) -> PathBuf {
        self.out.join("matrix")
    }

    fn write_manifest(&self) -> Result<(), StageError> {
        write_file(&self.out.join("manifest.json"), &self.manifest.to_json())
    }

    fn polygons(&self) -> Result<PolygonSet, StageError> {
        let path = self.config.resolve(self.config.sources.polygons.as_ref().expect("validated"));
        let set = read_polygons(&path, &self.config.polygon_keys)?;
        if set.digest != self.manifest.polygon_digest {
            return Err(StageError::Invalid(format!("{} changed since the run started", path.display())));
        }
        Ok(set)
    }

    pub fn run(&self, stages: &[Stage]) -> Result<(), PipelineError> {
        for &stage in stages {
            info!("stage {stage}");
            self.write_manifest().stage(stage)?;
            match stage {
                Stage::Ingest => self.ingest(),
                Stage::Build => self.build(),
                Stage::Summarize => self.summarize(),
                Stage::Train => self.train(),
                Stage::Maps => self.maps(),
            }
            .stage(stage)?;
        }
        Ok(())
    }

    pub fn run_all(&self) -> Result<(), PipelineError> {
        self.run(&Stage::ALL)
    }

    fn ingest(&self) -> Result<(), StageError> {
        let cfg = &self.config;
        let staging = self.staging();
        fs::create_dir_all(&staging).map_err(io_err(&staging))?;
        let index = ZoneIndex::new(self.polygons()?.polygons);
        let opts = &cfg.parse;
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| cfg.resolve(p));

        fn note<T>(name: &str, p: &Parsed<T>) {
            for w in &p.warnings {
                warn!("{name} line {}: {}", w.line, w.message);
            }
            info!("{name}: {} records from {} lines, {} unusable cells", p.records.len(), p.lines, p.missing_cells);
        }

        let census = parse_census(&path(&cfg.sources.census).expect("validated"), &cfg.census_schema, opts)?;
        note("census", &census);
        write_jsonl(&staging.join("census.jsonl"), &census.records)?;

        macro_rules! stage_source {
            ($name:literal, $parsed:expr) => {{
                let parsed = $parsed;
                note($name, &parsed);
                let (kept, dropped) = filter_to_states(parsed.records, &index, &cfg.states);
                if dropped > 0 {
                    info!("{}: {dropped} records outside {:?}", $name, cfg.states);
                }
                write_jsonl(&staging.join(concat!($name, ".jsonl")), &kept)?;
            }};
        }

        let window = DateWindow::year(cfg.outcome_year);
        stage_source!("patents", parse_patents(&path(&cfg.sources.patents).expect("validated"), window, opts)?);
        stage_source!("sfr", parse_sfr(&path(&cfg.sources.sfr).expect("validated"), opts)?);
        stage_source!(
            "rnd",
            match path(&cfg.sources.rnd) {
                Some(p) => parse_rnd(&p, cfg.base_year, opts)?,
                None => Parsed::new(),
            }
        );
        stage_source!(
            "h1b",
            match path(&cfg.sources.h1b) {
                Some(p) => parse_h1b(&p, opts)?,
                None => Parsed::new(),
            }
        );
        stage_source!(
            "business",
            match path(&cfg.sources.business) {
                Some(p) => parse_business(&p, cfg.base_year, opts)?,
                None => Parsed::new(),
            }
        );

        let mut pois: Vec<PoiRecord> = Vec::new();
        for (kind, p) in &cfg.sources.poi {
            let parsed = parse_poi(&cfg.resolve(p), *kind)?;
            note(&format!("poi.{kind}"), &parsed);
            pois.extend(parsed.records);
        }
        if let Some(fetch) = &cfg.fetch {
            let cache = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| self.out.join("cache"));
            let transport: Box<dyn Transport> = match fetch.mode {
                FetchMode::Replay => Box::new(OfflineTransport),
                _ => Box::new(HttpTransport::new(Duration::from_secs(300))?),
            };
            let mut fetcher = CachedFetcher::new(transport, cache, fetch.mode);
            if let Some(url) = &fetch.endpoint {
                fetcher = fetcher.with_url(url.clone());
            }
            for kind in &fetch.kinds {
                if cfg.sources.poi.contains_key(kind) {
                    continue;
                }
                let spec = QuerySpec { bbox: fetch.bbox, kind: *kind, keywords: fetch.keywords.clone() };
                let got = fetcher.fetch_pois(&spec)?;
                info!("poi.{kind}: {} records from the fetch cache", got.len());
                pois.extend(got);
            }
        }
        let before = pois.len();
        let (kept, dropped) = filter_to_states(pois, &index, &cfg.states);
        info!("poi: kept {} of {before}, {dropped} outside the configured states", kept.len());
        write_jsonl(&staging.join("poi.jsonl"), &kept)?;
        Ok(())
    }

    fn build(&self) -> Result<(), StageError> {
        let staging = self.staging();
        let need = |name: &str| {
            let p = staging.join(name);
            if p.is_file() {
                Ok(p)
            } else {
                Err(StageError::Invalid(format!("{} missing; run the ingest stage first", p.display())))
            }
        };
        let sources = Sources {
            census: read_jsonl(&need("census.jsonl")?)?,
            patents: read_jsonl(&need("patents.jsonl")?)?,
            pois: read_jsonl(&need("poi.jsonl")?)?,
            rnd: read_jsonl(&need("rnd.jsonl")?)?,
            h1b: read_jsonl(&need("h1b.jsonl")?)?,
            sfr: read_jsonl(&need("sfr.jsonl")?)?,
            business: read_jsonl(&need("business.jsonl")?)?,
        };
        let index = ZoneIndex::new(self.polygons()?.polygons);
        let (m, join) = build_matrix(&sources, &index, &self.catalog, &self.config.build_options())?;
        let violations = validate_matrix(&m, &self.catalog, self.config.outcome_year - self.config.base_year);
        if let Some(v) = violations.first() {
            return Err(StageError::Invalid(format!(
                "matrix failed validation ({} violations), first: {v}",
                violations.len()
            )));
        }
        info!("matrix: {} zones, {} dropped", m.n_zones(), join.dropped.len());
        let dir = self.matrix_dir();
        m.write_dir(&dir, &self.catalog)?;
        write_file(&dir.join("join_report.txt"), &format!("# manifest={}\n{}", self.digest, join.render()))
    }

    fn matrix(&self) -> Result<FeatureMatrix, StageError> {
        let dir = self.matrix_dir();
        if !dir.join(crate::model::MATRIX_FILE).is_file() {
            return Err(StageError::Invalid(format!("no matrix in {}; run the build stage first", dir.display())));
        }
        Ok(FeatureMatrix::read_dir(&dir, &self.catalog)?)
    }

    fn summarize(&self) -> Result<(), StageError> {
        let m = self.matrix()?;
        for scope in self.scopes() {
            let summary = summarize(&m, &self.catalog, &scope);
            if summary.n_zones == 0 {
                warn!("scope {} has no zones; writing a header-only summary", scope.label);
            }
            let path = self.out.join("tables").join(format!("summary_{}.tsv", scope.id));
            write_file(&path, &emit_summary_table(&summary, &self.digest))?;
        }
        Ok(())
    }

    fn train(&self) -> Result<(), StageError> {
        let m = self.matrix()?;
        for outcome in self.outcomes.outcomes() {
            let mut reports: Vec<ImportanceReport> = Vec::new();
            for scope in self.scopes() {
                let r = seed_averaged_importance(
                    &m,
                    &self.catalog,
                    outcome,
                    &scope,
                    &self.config.forest,
                    self.config.master_seed,
                )?;
                info!("{} / {}: {} rows, {} seeds", outcome.column(), scope.label, r.n_rows, r.seeds.len());
                let base = format!("{}_{}", outcome.slug(), scope.id);
                write_file(&self.out.join("importance").join(format!("{base}.json")), &r.to_json())?;
                write_file(
                    &self.out.join("tables").join(format!("importance_{base}.seeds.tsv")),
                    &emit_seed_table(&r, &self.digest),
                )?;
                reports.push(r);
            }
            let table = emit_importance_table(&reports, &self.catalog, &self.digest)?;
            write_file(&self.out.join("tables").join(format!("importance_{}.tsv", outcome.slug())), &table)?;
        }
        Ok(())
    }

    fn maps(&self) -> Result<(), StageError> {
        let m = self.matrix()?;
        let polygons = self.polygons()?.polygons;
        for column in &self.config.map_columns {
            for scope in self.scopes() {
                let (text, warnings) = emit_choropleth(&m, &self.catalog, column, &scope, &polygons, &self.digest)?;
                for w in warnings {
                    warn!("{w}");
                }
                write_file(&self.out.join("maps").join(format!("{column}_{}.geojson", scope.id)), &text)?;
            }
        }
        Ok(())
    }
}
