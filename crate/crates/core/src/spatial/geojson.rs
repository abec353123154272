use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::model::{Ring, StateCode, ZoneCode, ZoneId, ZonePolygon};

use super::geometry::polygon_area_m2;
use super::SpatialError;

/// Property keys used to read zone polygons from a FeatureCollection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolygonKeys {
    pub zone: String,
    pub state: String,
    /// Land area in m²; when absent or missing on a feature the area is
    /// computed from the geometry.
    pub land_area: Option<String>,
}

impl Default for PolygonKeys {
    fn default() -> Self {
        Self { zone: "ZCTA5CE10".into(), state: "STATE".into(), land_area: Some("ALAND10".into()) }
    }
}

#[derive(Debug, Clone)]
pub struct PolygonSet {
    /// Sorted by zone.
    pub polygons: Vec<ZonePolygon>,
    /// SHA-256 of the source bytes.
    pub digest: String,
}

pub fn read_polygons(path: &Path, keys: &PolygonKeys) -> Result<PolygonSet, SpatialError> {
    let bytes = std::fs::read(path)?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let polygons = parse_polygons(&bytes, keys)?;
    Ok(PolygonSet { polygons, digest })
}

pub fn parse_polygons(bytes: &[u8], keys: &PolygonKeys) -> Result<Vec<ZonePolygon>, SpatialError> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| SpatialError::GeoJson(e.to_string()))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(SpatialError::GeoJson("top-level object is not a FeatureCollection".into()));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| SpatialError::GeoJson("missing `features` array".into()))?;

    let mut merged: BTreeMap<ZoneId, (Vec<Ring>, Option<f64>)> = BTreeMap::new();
    for (i, f) in features.iter().enumerate() {
        let props = f.get("properties").and_then(Value::as_object);
        let prop = |key: &str| props.and_then(|p| p.get(key));
        let code = prop(&keys.zone)
            .and_then(scalar_text)
            .ok_or_else(|| SpatialError::GeoJson(format!("feature {i}: missing `{}`", keys.zone)))?;
        let code = ZoneCode::parse_lenient(&code).map_err(|e| SpatialError::GeoJson(format!("feature {i}: {e}")))?;
        let state = prop(&keys.state)
            .and_then(scalar_text)
            .ok_or_else(|| SpatialError::GeoJson(format!("feature {i}: missing `{}`", keys.state)))?;
        let state = StateCode::new(&state).map_err(|e| SpatialError::GeoJson(format!("feature {i}: {e}")))?;
        let area = keys.land_area.as_deref().and_then(prop).and_then(Value::as_f64);
        let rings =
            geometry_rings(f.get("geometry")).map_err(|e| SpatialError::GeoJson(format!("feature {i}: {e}")))?;

        let entry = merged.entry(ZoneId::new(code, state)).or_insert((Vec::new(), Some(0.0)));
        entry.0.extend(rings);
        entry.1 = match (entry.1, area) {
            (Some(acc), Some(a)) => Some(acc + a),
            _ => None,
        };
    }

    let mut out = Vec::with_capacity(merged.len());
    for (zone, (rings, area)) in merged {
        let provisional = ZonePolygon::new(zone, rings, 0.0)?;
        let area = match area {
            Some(a) => a,
            None => polygon_area_m2(&provisional)?,
        };
        out.push(ZonePolygon::new(zone, provisional.rings, area)?);
    }
    Ok(out)
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn geometry_rings(g: Option<&Value>) -> Result<Vec<Ring>, String> {
    let g = g.ok_or("missing geometry")?;
    let coords = g.get("coordinates").ok_or("geometry without coordinates")?;
    match g.get("type").and_then(Value::as_str) {
        Some("Polygon") => polygon_rings(coords),
        Some("MultiPolygon") => {
            let parts = coords.as_array().ok_or("MultiPolygon coordinates not an array")?;
            let mut out = Vec::new();
            for part in parts {
                out.extend(polygon_rings(part)?);
            }
            Ok(out)
        }
        other => Err(format!("unsupported geometry type {other:?}")),
    }
}

fn polygon_rings(v: &Value) -> Result<Vec<Ring>, String> {
    let rings = v.as_array().ok_or("Polygon coordinates not an array")?;
    rings
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or("ring not an array")?
                .iter()
                .map(|pos| {
                    let a = pos.as_array().ok_or("position not an array")?;
                    match (a.first().and_then(Value::as_f64), a.get(1).and_then(Value::as_f64)) {
                        (Some(x), Some(y)) => Ok([x, y]),
                        _ => Err("position needs two numbers".to_string()),
                    }
                })
                .collect::<Result<Ring, String>>()
        })
        .collect()
}
