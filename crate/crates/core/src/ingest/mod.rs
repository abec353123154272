//! Typed source records, their parsers, state filtering and the
//! record-and-replay POI fetch client.

mod fetch;
mod parse;
mod records;

pub use fetch::{
    overpass_queries, parse_overpass, CachedFetcher, FetchMode, HttpTransport, OfflineTransport, QuerySpec, Transport,
    OVERPASS_URL,
};
pub use parse::{
    parse_business, parse_census, parse_h1b, parse_patents, parse_poi, parse_rnd, parse_sfr, CensusSchema, DateWindow,
    ParseOptions, ParseWarning, Parsed, YearBuiltBin,
};
pub use records::*;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::model::{StateCode, ZoneCode};
use crate::spatial::{contains, ZoneIndex};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("zone {0} appears more than once")]
    DuplicateZone(ZoneCode),
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("network unavailable and no cached response for {0}")]
    NetworkUnavailable(String),
    #[error("cache entry {0} is corrupt")]
    CacheCorrupt(String),
    #[error("HTTP: {0}")]
    Http(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl IngestError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io { path: path.display().to_string(), source }
    }
}

/// Where a record sits: a coordinate, a zone code, or both.
pub trait Located {
    fn point(&self) -> Option<[f64; 2]>;
    fn zone_code(&self) -> Option<ZoneCode>;
}

impl Located for PatentRecord {
    fn point(&self) -> Option<[f64; 2]> {
        Some([self.lon?, self.lat?])
    }
    fn zone_code(&self) -> Option<ZoneCode> {
        Some(self.zone)
    }
}

impl Located for PoiRecord {
    fn point(&self) -> Option<[f64; 2]> {
        Some([self.lon, self.lat])
    }
    fn zone_code(&self) -> Option<ZoneCode> {
        None
    }
}

macro_rules! zone_located {
    ($($t:ty),*) => {$(
        impl Located for $t {
            fn point(&self) -> Option<[f64; 2]> {
                None
            }
            fn zone_code(&self) -> Option<ZoneCode> {
                Some(self.zone)
            }
        }
    )*};
}
zone_located!(RnDRecord, H1bRecord, SfrRecord, BizRegRecord);

/// Keeps records located in one of `states`. A coordinate is kept when any
/// polygon of a configured state contains it, boundary included, so points
/// on a state line survive for both sides. Records without a coordinate
/// fall back to their zone code. Returns the kept records and the number
/// dropped.
pub fn filter_to_states<T: Located>(records: Vec<T>, index: &ZoneIndex, states: &[StateCode]) -> (Vec<T>, usize) {
    let before = records.len();
    let kept: Vec<T> = records
        .into_iter()
        .filter(|r| match (r.point(), r.zone_code()) {
            (Some(p), _) => index.candidates(p).any(|poly| poly.zone.in_states(states) && contains(&poly.rings, p)),
            (None, Some(code)) => {
                index.polygons().iter().any(|poly| poly.zone.code == code && poly.zone.in_states(states))
            }
            (None, None) => false,
        })
        .collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Writes records as newline-delimited JSON.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line =
            serde_json::to_string(r).map_err(|e| IngestError::MalformedRow { line: 0, reason: e.to_string() })?;
        writeln!(w, "{line}").map_err(|e| IngestError::io(path, e))?;
    }
    w.flush().map_err(|e| IngestError::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IngestError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| IngestError::MalformedRow { line: i as u64 + 1, reason: e.to_string() })?;
        out.push(r);
    }
    Ok(out)
}
