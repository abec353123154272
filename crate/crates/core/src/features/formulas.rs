use std::collections::BTreeSet;

use crate::ingest::{CensusRecord, PatentRecord, YearBuiltBin};
use crate::model::ZoneCode;

use super::FeatureError;

/// Distinct `(rf_id, zone)` pairs. A patent listed under several zones
/// counts once in each of them.
pub fn dedup_patents(records: &[PatentRecord]) -> BTreeSet<(String, ZoneCode)> {
    records.iter().map(|r| (r.rf_id.clone(), r.zone)).collect()
}

/// `count × 1000 / population`.
pub fn per_1000(count: f64, population: u64) -> Result<f64, FeatureError> {
    if population == 0 {
        return Err(FeatureError::ZeroPopulation);
    }
    Ok(count * 1000.0 / population as f64)
}

/// `count / population`, as a fraction.
pub fn share(count: u64, population: u64) -> Result<f64, FeatureError> {
    if population == 0 {
        return Err(FeatureError::ZeroPopulation);
    }
    Ok(count as f64 / population as f64)
}

/// Commute-mode shares of total population. A missing count masks only
/// its own share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommuteShares {
    pub car_truck_van: Option<f64>,
    pub public_transit: Option<f64>,
    /// Walking and cycling combined before dividing.
    pub walk_bike: Option<f64>,
    pub worked_from_home: Option<f64>,
    pub worked_outside_state: Option<f64>,
    pub worked_in_state: Option<f64>,
    pub worked_in_county: Option<f64>,
    pub worked_outside_county: Option<f64>,
    pub worked_in_place: Option<f64>,
}

pub fn commute_shares(c: &CensusRecord) -> Result<CommuteShares, FeatureError> {
    let pop = match c.total_population {
        Some(p) if p > 0 => p,
        _ => return Err(FeatureError::ZeroPopulation),
    };
    let of = |v: Option<u64>| v.map(|v| v as f64 / pop as f64);
    let walk_bike = match (c.walk, c.bike) {
        (Some(w), Some(b)) => Some((w + b) as f64 / pop as f64),
        _ => None,
    };
    Ok(CommuteShares {
        car_truck_van: of(c.car_truck_van),
        public_transit: of(c.public_transit),
        walk_bike,
        worked_from_home: of(c.worked_from_home),
        worked_outside_state: of(c.worked_outside_state),
        worked_in_state: of(c.worked_in_state),
        worked_in_county: of(c.worked_in_county),
        worked_outside_county: of(c.worked_outside_county),
        worked_in_place: of(c.worked_in_place),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingAge {
    pub mean: f64,
    /// Population (weighted) standard deviation.
    pub sd: f64,
    /// Coefficient of variation `sd / mean`; 0 when the mean is 0.
    pub mix: f64,
}

/// Unit-weighted moments of building age, taking each bin's age as
/// `base_year − midpoint year`.
pub fn building_age_indicators(
    bins: &[YearBuiltBin],
    counts: &[Option<u64>],
    base_year: i32,
) -> Result<BuildingAge, FeatureError> {
    if bins.len() != counts.len() || counts.iter().any(Option::is_none) {
        return Err(FeatureError::EmptyHistogram);
    }
    let weighted: Vec<(f64, f64)> = bins
        .iter()
        .zip(counts)
        .map(|(b, c)| (f64::from(base_year) - b.midpoint_year(base_year), c.unwrap_or(0) as f64))
        .collect();
    let total: f64 = weighted.iter().map(|&(_, w)| w).sum();
    if total == 0.0 {
        return Err(FeatureError::EmptyHistogram);
    }
    let mean = weighted.iter().map(|&(a, w)| w * a).sum::<f64>() / total;
    let var = weighted.iter().map(|&(a, w)| w * (a - mean) * (a - mean)).sum::<f64>() / total;
    let sd = var.sqrt();
    let mix = if mean == 0.0 { 0.0 } else { sd / mean };
    Ok(BuildingAge { mean, sd, mix })
}
