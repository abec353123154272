//! Overpass POI queries behind a content-addressed response cache.
//!
//! A cache entry is `<key>.body` plus `<key>.meta.json`, where `key` is
//! the SHA-256 of the endpoint and query text. Replays never touch the
//! network, so a recorded cache makes ingestion reproducible offline.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::spatial::{planar_area, project_laea};

use super::records::{PoiKind, PoiRecord};
use super::IngestError;

pub const OVERPASS_URL: &str = "https://overpass-api.de/api/interpreter";

/// POIs of one kind inside `bbox = [min_lon, min_lat, max_lon, max_lat]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub bbox: [f64; 4],
    pub kind: PoiKind,
    /// Name keywords, used only for innovation spaces. Earlier keywords win
    /// when one element matches several.
    #[serde(default)]
    pub keywords: Vec<String>,
}

fn osm_selector(kind: PoiKind) -> (&'static str, &'static str) {
    match kind {
        PoiKind::School => ("nw", r#"["amenity"="school"]"#),
        PoiKind::University => ("nw", r#"["amenity"="university"]"#),
        PoiKind::Cafe => ("nw", r#"["amenity"="cafe"]"#),
        PoiKind::Park => ("way", r#"["leisure"="park"]"#),
        PoiKind::Square => ("way", r#"["place"="square"]"#),
        PoiKind::BusStop => ("node", r#"["highway"="bus_stop"]"#),
        PoiKind::InnovationSpace => ("nw", ""),
    }
}

fn escape_regex(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if "\\.+*?()|[]{}^$\"".contains(c) {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

/// Overpass QL for `spec`: one query, or one per keyword for innovation
/// spaces. Paired with the keyword each query searched for.
pub fn overpass_queries(spec: &QuerySpec) -> Vec<(String, Option<String>)> {
    let [w, s, e, n] = spec.bbox;
    let bbox = format!("({s},{w},{n},{e})");
    let (types, filter) = osm_selector(spec.kind);
    let build = |filter: &str| format!("[out:json][timeout:180];{types}{filter}{bbox};out geom;");
    if spec.kind == PoiKind::InnovationSpace {
        spec.keywords
            .iter()
            .map(|k| (build(&format!(r#"["name"~"{}",i]"#, escape_regex(k))), Some(k.clone())))
            .collect()
    } else {
        vec![(build(filter), None)]
    }
}

/// Sends one query and returns the raw response body.
pub trait Transport: Send + Sync {
    fn post(&self, url: &str, query: &str) -> Result<Vec<u8>, IngestError>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Result<Self, IngestError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .user_agent(concat!("lid/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| IngestError::Http(e.to_string()))?;
        Ok(Self { client })
    }
}

impl Transport for HttpTransport {
    fn post(&self, url: &str, query: &str) -> Result<Vec<u8>, IngestError> {
        let resp = self.client.post(url).form(&[("data", query)]).send().map_err(|e| {
            if e.is_connect() || e.is_timeout() {
                IngestError::NetworkUnavailable(url.to_string())
            } else {
                IngestError::Http(e.to_string())
            }
        })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(IngestError::Http(format!("{url} returned {status}")));
        }
        Ok(resp.bytes().map_err(|e| IngestError::Http(e.to_string()))?.to_vec())
    }
}

/// Always fails; pairs with [`FetchMode::Replay`] for offline runs.
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn post(&self, url: &str, _query: &str) -> Result<Vec<u8>, IngestError> {
        Err(IngestError::NetworkUnavailable(url.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FetchMode {
    /// Serve from cache; on a miss, fetch and record.
    #[default]
    Record,
    /// Serve from cache only.
    Replay,
    /// Always fetch and overwrite the cache.
    Refresh,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheMeta {
    url: String,
    query: String,
    body_sha256: String,
    bytes: u64,
}

pub struct CachedFetcher {
    transport: Box<dyn Transport>,
    dir: PathBuf,
    mode: FetchMode,
    url: String,
    // one writer at a time, so a body and its metadata never interleave
    write_lock: Mutex<()>,
}

impl CachedFetcher {
    pub fn new(transport: Box<dyn Transport>, dir: impl Into<PathBuf>, mode: FetchMode) -> Self {
        Self { transport, dir: dir.into(), mode, url: OVERPASS_URL.to_string(), write_lock: Mutex::new(()) }
    }

    pub fn with_url(mut self, url: impl Into<String>) -> Self {
        self.url = url.into();
        self
    }

    pub fn cache_key(&self, query: &str) -> String {
        let mut h = Sha256::new();
        h.update(self.url.as_bytes());
        h.update(b"\n");
        h.update(query.as_bytes());
        hex::encode(h.finalize())
    }

    fn paths(&self, key: &str) -> (PathBuf, PathBuf) {
        (self.dir.join(format!("{key}.body")), self.dir.join(format!("{key}.meta.json")))
    }

    fn read_cached(&self, key: &str) -> Result<Option<Vec<u8>>, IngestError> {
        let (body_path, meta_path) = self.paths(key);
        if !body_path.exists() && !meta_path.exists() {
            return Ok(None);
        }
        let body = fs::read(&body_path).map_err(|_| IngestError::CacheCorrupt(key.to_string()))?;
        let meta: CacheMeta = fs::read(&meta_path)
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .ok_or_else(|| IngestError::CacheCorrupt(key.to_string()))?;
        if meta.body_sha256 != hex::encode(Sha256::digest(&body)) || meta.bytes != body.len() as u64 {
            return Err(IngestError::CacheCorrupt(key.to_string()));
        }
        Ok(Some(body))
    }

    fn write_cached(&self, key: &str, query: &str, body: &[u8]) -> Result<(), IngestError> {
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        fs::create_dir_all(&self.dir).map_err(|e| IngestError::io(&self.dir, e))?;
        let (body_path, meta_path) = self.paths(key);
        let meta = CacheMeta {
            url: self.url.clone(),
            query: query.to_string(),
            body_sha256: hex::encode(Sha256::digest(body)),
            bytes: body.len() as u64,
        };
        let meta = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
        write_atomic(&body_path, body)?;
        write_atomic(&meta_path, &meta)
    }

    /// Raw response body for `query`, honouring the fetch mode.
    pub fn fetch(&self, query: &str) -> Result<Vec<u8>, IngestError> {
        let key = self.cache_key(query);
        if self.mode != FetchMode::Refresh {
            if let Some(body) = self.read_cached(&key)? {
                return Ok(body);
            }
            if self.mode == FetchMode::Replay {
                return Err(IngestError::NetworkUnavailable(format!("{} (cache key {key})", self.url)));
            }
        }
        let body = self.transport.post(&self.url, query)?;
        self.write_cached(&key, query, &body)?;
        Ok(body)
    }

    /// All POIs matching `spec`, de-duplicated by OSM element.
    pub fn fetch_pois(&self, spec: &QuerySpec) -> Result<Vec<PoiRecord>, IngestError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (query, keyword) in overpass_queries(spec) {
            let body = self.fetch(&query)?;
            for (id, rec) in parse_overpass(&body, spec.kind, keyword.as_deref())? {
                if seen.insert(id) {
                    out.push(rec);
                }
            }
        }
        Ok(out)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IngestError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| IngestError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| IngestError::io(path, e))
}

/// Converts an Overpass JSON response into POI records keyed by
/// `type/id`. Area kinds need closed way geometry; the point of a way is
/// the mean of its distinct vertices.
pub fn parse_overpass(
    body: &[u8],
    kind: PoiKind,
    keyword: Option<&str>,
) -> Result<Vec<(String, PoiRecord)>, IngestError> {
    let doc: Value =
        serde_json::from_slice(body).map_err(|e| IngestError::MalformedRow { line: 0, reason: e.to_string() })?;
    let elements = doc
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| IngestError::MalformedRow { line: 0, reason: "response has no `elements`".into() })?;
    let mut out = Vec::new();
    for el in elements {
        let ty = el.get("type").and_then(Value::as_str).unwrap_or("");
        let id = el.get("id").and_then(Value::as_u64).unwrap_or(0);
        let name = el.pointer("/tags/name").and_then(Value::as_str).unwrap_or("").to_string();
        let coords: Vec<[f64; 2]> = match ty {
            "node" => match (el.get("lon").and_then(Value::as_f64), el.get("lat").and_then(Value::as_f64)) {
                (Some(x), Some(y)) => vec![[x, y]],
                _ => continue,
            },
            "way" => el
                .get("geometry")
                .and_then(Value::as_array)
                .map(|g| g.iter().filter_map(|p| Some([p.get("lon")?.as_f64()?, p.get("lat")?.as_f64()?])).collect())
                .unwrap_or_default(),
            _ => continue,
        };
        if coords.is_empty() {
            continue;
        }
        let closed = coords.len() >= 4 && coords.first() == coords.last();
        let area_m2 = if kind.has_area() {
            if ty != "way" || !closed {
                continue;
            }
            Some(ring_area_m2(&coords))
        } else {
            None
        };
        let distinct = if closed { &coords[..coords.len() - 1] } else { &coords[..] };
        let n = distinct.len() as f64;
        let lon = distinct.iter().map(|c| c[0]).sum::<f64>() / n;
        let lat = distinct.iter().map(|c| c[1]).sum::<f64>() / n;
        let matched_keyword = if kind == PoiKind::InnovationSpace { keyword.map(str::to_string) } else { None };
        out.push((format!("{ty}/{id}"), PoiRecord { kind, name, lon, lat, area_m2, matched_keyword }));
    }
    Ok(out)
}

fn ring_area_m2(ring: &[[f64; 2]]) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in ring {
        for k in 0..2 {
            lo[k] = lo[k].min(c[k]);
            hi[k] = hi[k].max(c[k]);
        }
    }
    let (lon0, lat0) = ((lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0);
    let projected: Vec<[f64; 2]> = ring.iter().map(|c| project_laea(c[0], c[1], lon0, lat0)).collect();
    planar_area(&[projected]).unwrap_or(0.0)
}
