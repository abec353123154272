use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::model::ZonePolygon;

use super::SpatialError;

/// Square meters per international acre.
pub const SQUARE_METERS_PER_ACRE: f64 = 4_046.856_422_4;
/// Square meters per international square mile.
pub const SQUARE_METERS_PER_SQUARE_MILE: f64 = 2_589_988.110_336;
/// Radius of the sphere with the WGS84 ellipsoid's surface area.
pub const AUTHALIC_RADIUS_M: f64 = 6_371_007.180_918_5;

/// Signed shoelace area; positive for counter-clockwise rings.
pub fn shoelace<T: Float>(ring: &[[T; 2]]) -> T {
    let mut twice = T::zero();
    for w in ring.windows(2) {
        twice = twice + (w[0][0] * w[1][1] - w[1][0] * w[0][1]);
    }
    twice / (T::one() + T::one())
}

fn on_segment<T: Float>(p: [T; 2], a: [T; 2], b: [T; 2]) -> bool {
    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    cross == T::zero()
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Whether `p` lies on any edge of `ring`.
pub fn on_ring_boundary<T: Float>(p: [T; 2], ring: &[[T; 2]]) -> bool {
    ring.windows(2).any(|w| on_segment(p, w[0], w[1]))
}

/// Ray-crossing parity of `p` against one ring (boundary not special-cased).
pub fn ring_parity<T: Float>(p: [T; 2], ring: &[[T; 2]]) -> bool {
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Even-odd containment over all rings; points on any edge count as inside.
pub fn contains<T: Float>(rings: &[Vec<[T; 2]>], p: [T; 2]) -> bool {
    if rings.iter().any(|r| on_ring_boundary(p, r)) {
        return true;
    }
    rings.iter().fold(false, |acc, r| acc ^ ring_parity(p, r))
}

/// Area of a flat ring set under the even-odd rule: a ring nested inside an
/// odd number of other rings is a hole.
pub fn planar_area<T: Float>(rings: &[Vec<[T; 2]>]) -> Result<T, SpatialError> {
    let mut area = T::zero();
    for (i, ring) in rings.iter().enumerate() {
        if ring.len() < 4 {
            return Err(SpatialError::DegenerateRing { vertices: ring.len() });
        }
        let depth = rings.iter().enumerate().filter(|&(j, other)| j != i && ring_parity(ring[0], other)).count();
        let a = shoelace(ring).abs();
        area = if depth % 2 == 0 { area + a } else { area - a };
    }
    Ok(area.max(T::zero()))
}

/// Spherical Lambert azimuthal equal-area projection about `(lon0, lat0)`,
/// returning meters.
pub fn project_laea(lon: f64, lat: f64, lon0: f64, lat0: f64) -> [f64; 2] {
    let (phi, lam) = (lat.to_radians(), lon.to_radians());
    let (phi0, lam0) = (lat0.to_radians(), lon0.to_radians());
    let dl = lam - lam0;
    let denom = 1.0 + phi0.sin() * phi.sin() + phi0.cos() * phi.cos() * dl.cos();
    let k = (2.0 / denom).sqrt();
    [
        AUTHALIC_RADIUS_M * k * phi.cos() * dl.sin(),
        AUTHALIC_RADIUS_M * k * (phi0.cos() * phi.sin() - phi0.sin() * phi.cos() * dl.cos()),
    ]
}

/// Area in m² of a lon/lat polygon, projected to a local equal-area plane
/// centred on its bounding box.
pub fn polygon_area_m2(p: &ZonePolygon) -> Result<f64, SpatialError> {
    if let Some(r) = p.rings.iter().find(|r| r.len() < 4) {
        return Err(SpatialError::DegenerateRing { vertices: r.len() });
    }
    if p.rings.is_empty() {
        return Ok(0.0);
    }
    let bb = p.bbox();
    let (lon0, lat0) = ((bb[0] + bb[2]) / 2.0, (bb[1] + bb[3]) / 2.0);
    let projected: Vec<Vec<[f64; 2]>> =
        p.rings.iter().map(|r| r.iter().map(|c| project_laea(c[0], c[1], lon0, lat0)).collect()).collect();
    planar_area(&projected)
}

pub fn acres(area_m2: f64) -> f64 {
    area_m2 / SQUARE_METERS_PER_ACRE
}

pub fn acres_to_m2(acres: f64) -> f64 {
    acres * SQUARE_METERS_PER_ACRE
}

/// Multiplier applied to people per m².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityUnit {
    /// ×1,000,000, people per km².
    #[default]
    PerSquareKm,
    /// ×2,589,988.110336, people per square mile.
    PerSquareMile,
}

impl DensityUnit {
    pub fn factor(self) -> f64 {
        match self {
            DensityUnit::PerSquareKm => 1_000_000.0,
            DensityUnit::PerSquareMile => SQUARE_METERS_PER_SQUARE_MILE,
        }
    }
}

/// `population / land_area_m2 * factor`.
pub fn population_density(population: f64, land_area_m2: f64, unit: DensityUnit) -> Result<f64, SpatialError> {
    if land_area_m2.is_nan() || land_area_m2 <= 0.0 {
        return Err(SpatialError::DegenerateZone);
    }
    Ok(population / land_area_m2 * unit.factor())
}
