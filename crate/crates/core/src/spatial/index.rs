use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{RTree, AABB};

use crate::model::{ZoneId, ZonePolygon};

use super::geometry::contains;

type Entry = GeomWithData<Rectangle<[f64; 2]>, usize>;

/// Bounding-box R-tree over zone polygons. Immutable once built.
#[derive(Debug, Clone)]
pub struct ZoneIndex {
    polygons: Vec<ZonePolygon>,
    tree: RTree<Entry>,
}

impl ZoneIndex {
    pub fn new(polygons: Vec<ZonePolygon>) -> Self {
        let entries = polygons
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.rings.is_empty())
            .map(|(i, p)| {
                let bb = p.bbox();
                GeomWithData::new(Rectangle::from_corners([bb[0], bb[1]], [bb[2], bb[3]]), i)
            })
            .collect();
        Self { polygons, tree: RTree::bulk_load(entries) }
    }

    pub fn polygons(&self) -> &[ZonePolygon] {
        &self.polygons
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn get(&self, zone: &ZoneId) -> Option<&ZonePolygon> {
        self.polygons.iter().find(|p| p.zone == *zone)
    }

    /// Polygons whose bounding box contains `point`.
    pub fn candidates(&self, point: [f64; 2]) -> impl Iterator<Item = &ZonePolygon> {
        self.tree.locate_in_envelope_intersecting(&AABB::from_point(point)).map(|e| &self.polygons[e.data])
    }

    /// Zone containing `point` (boundary inclusive). When several polygons
    /// contain it, the smallest zone id wins.
    pub fn assign_zone(&self, point: [f64; 2]) -> Option<ZoneId> {
        if !point.iter().all(|c| c.is_finite()) {
            return None;
        }
        self.candidates(point).filter(|p| contains(&p.rings, point)).map(|p| p.zone).min()
    }
}
