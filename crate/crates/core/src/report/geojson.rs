use std::collections::HashMap;

use serde_json::{json, Map, Value};

use crate::model::{FeatureCatalog, FeatureMatrix, Outcome, Ring, Scope, ZoneId, ZonePolygon, AUX_COLUMNS};
use crate::spatial::{ring_parity, shoelace};

use super::ReportError;

pub const QUANTILE_BINS: usize = 5;

/// Values of a named column in row order; `None` for masked cells.
pub fn column_values(
    m: &FeatureMatrix,
    catalog: &FeatureCatalog,
    column: &str,
) -> Result<Vec<Option<f64>>, ReportError> {
    if let Some(c) = catalog.index_of(column) {
        return Ok(m.column(c));
    }
    if let Some(o) = Outcome::ALL.into_iter().find(|o| o.column() == column) {
        return Ok(m.outcome(o).into_iter().map(Some).collect());
    }
    if let Some(k) = AUX_COLUMNS.iter().position(|a| *a == column) {
        return Ok(m.aux.iter().map(|row| row[k]).collect());
    }
    Err(ReportError::UnknownColumn(column.to_string()))
}

/// Quintile class of each value: `floor(5 × #{values strictly below} / n)`.
/// Ties share the lower class, so a constant column is all class 0.
pub fn quantile_bins(values: &[Option<f64>]) -> Vec<Option<usize>> {
    let mut present: Vec<f64> = values.iter().flatten().copied().collect();
    present.sort_by(f64::total_cmp);
    let n = present.len();
    values
        .iter()
        .map(|v| {
            v.map(|v| {
                let below = present.partition_point(|&x| x < v);
                QUANTILE_BINS * below / n
            })
        })
        .collect()
}

/// Regroups a flat even-odd ring list into polygons with right-hand-rule
/// winding: exteriors counter-clockwise, holes clockwise.
fn polygons_of(rings: &[Ring]) -> Vec<Vec<Ring>> {
    let depth: Vec<usize> = rings
        .iter()
        .enumerate()
        .map(|(i, r)| rings.iter().enumerate().filter(|&(j, o)| j != i && ring_parity(r[0], o)).count())
        .collect();
    let oriented = |r: &Ring, ccw: bool| {
        let mut r = r.clone();
        if (shoelace(&r) > 0.0) != ccw {
            r.reverse();
        }
        r
    };
    let mut shells: Vec<(usize, Vec<Ring>)> = rings
        .iter()
        .enumerate()
        .filter(|&(i, _)| depth[i].is_multiple_of(2))
        .map(|(i, r)| (i, vec![oriented(r, true)]))
        .collect();
    for (i, r) in rings.iter().enumerate().filter(|&(i, _)| depth[i] % 2 == 1) {
        // the enclosing shell is the containing exterior one level up
        if let Some(shell) = shells.iter_mut().find(|(s, _)| depth[*s] + 1 == depth[i] && ring_parity(r[0], &rings[*s]))
        {
            shell.1.push(oriented(r, false));
        }
    }
    shells.into_iter().map(|(_, p)| p).collect()
}

fn geometry(p: &ZonePolygon) -> Value {
    let mut polys = polygons_of(&p.rings);
    if polys.len() == 1 {
        json!({"type": "Polygon", "coordinates": polys.remove(0)})
    } else {
        json!({"type": "MultiPolygon", "coordinates": polys})
    }
}

/// A choropleth-ready FeatureCollection for one column and scope. Bins
/// are computed over every zone in scope; zones without a polygon are
/// omitted and returned as warnings.
pub fn emit_choropleth(
    m: &FeatureMatrix,
    catalog: &FeatureCatalog,
    column: &str,
    scope: &Scope,
    polygons: &[ZonePolygon],
    manifest_digest: &str,
) -> Result<(String, Vec<String>), ReportError> {
    let sub = m.subset(&scope.states);
    let values = column_values(&sub, catalog, column)?;
    let bins = quantile_bins(&values);
    let by_zone: HashMap<ZoneId, &ZonePolygon> = polygons.iter().map(|p| (p.zone, p)).collect();

    let mut warnings = Vec::new();
    let mut features = Vec::new();
    for (r, zone) in sub.zones.iter().enumerate() {
        let Some(poly) = by_zone.get(zone) else {
            warnings.push(format!("zone {zone} has no polygon; omitted from {column} map"));
            continue;
        };
        features.push(json!({
            "type": "Feature",
            "geometry": geometry(poly),
            "properties": {
                "zone": zone.code.as_str(),
                "state": zone.state.as_str(),
                "value": values[r],
                "quantile_bin": bins[r],
            },
        }));
    }
    let mut doc = Map::new();
    doc.insert("type".into(), json!("FeatureCollection"));
    doc.insert("lid_manifest".into(), json!(manifest_digest));
    doc.insert("lid_column".into(), json!(column));
    doc.insert("lid_scope".into(), json!(scope.id));
    doc.insert("features".into(), Value::Array(features));
    let text = serde_json::to_string(&Value::Object(doc)).expect("GeoJSON serializes") + "\n";
    Ok((text, warnings))
}
