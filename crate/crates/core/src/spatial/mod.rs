//! Zone assignment, areas and densities.

mod geojson;
mod geometry;
mod index;

pub use geojson::{parse_polygons, read_polygons, PolygonKeys, PolygonSet};
pub use geometry::{
    acres, acres_to_m2, contains, on_ring_boundary, planar_area, polygon_area_m2, population_density, project_laea,
    ring_parity, shoelace, DensityUnit, AUTHALIC_RADIUS_M, SQUARE_METERS_PER_ACRE, SQUARE_METERS_PER_SQUARE_MILE,
};
pub use index::ZoneIndex;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpatialError {
    #[error("ring has {vertices} vertices, need at least 4")]
    DegenerateRing { vertices: usize },
    #[error("zone has zero land area")]
    DegenerateZone,
    #[error("GeoJSON: {0}")]
    GeoJson(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
