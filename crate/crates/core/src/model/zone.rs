use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Five-digit zip / ZCTA code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZoneCode([u8; 5]);

impl ZoneCode {
    /// Strict constructor: exactly five ASCII digits.
    pub fn new(code: &str) -> Result<Self, ModelError> {
        let bytes = code.as_bytes();
        if bytes.len() != 5 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(ModelError::InvalidZone(code.to_string()));
        }
        let mut out = [0u8; 5];
        out.copy_from_slice(bytes);
        Ok(Self(out))
    }

    /// Accepts the zip spellings found in administrative extracts:
    /// `02139`, `02139-4307`, `021394307`, and zero-stripped `2139`.
    pub fn parse_lenient(raw: &str) -> Result<Self, ModelError> {
        let trimmed = raw.trim();
        let head = trimmed.split('-').next().unwrap_or("");
        if !head.is_empty() && head.bytes().all(|b| b.is_ascii_digit()) {
            match head.len() {
                5 => return Self::new(head),
                9 => return Self::new(&head[..5]),
                3 | 4 => return Self::new(&format!("{head:0>5}")),
                _ => {}
            }
        }
        Err(ModelError::InvalidZone(raw.to_string()))
    }

    pub fn as_str(&self) -> &str {
        // constructed from ASCII digits only
        std::str::from_utf8(&self.0).expect("ascii digits")
    }
}

impl fmt::Display for ZoneCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ZoneCode {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl Serialize for ZoneCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ZoneCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Two-letter state tag (`MA`, `NY`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateCode([u8; 2]);

impl StateCode {
    pub fn new(code: &str) -> Result<Self, ModelError> {
        let upper = code.trim().to_ascii_uppercase();
        let bytes = upper.as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(u8::is_ascii_uppercase) {
            return Err(ModelError::InvalidState(code.to_string()));
        }
        Ok(Self([bytes[0], bytes[1]]))
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("ascii letters")
    }
}

impl fmt::Display for StateCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateCode {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl Serialize for StateCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for StateCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::new(&s).map_err(serde::de::Error::custom)
    }
}

/// A zone qualified by its state. Ordering is by code first, so the
/// "smallest zone" tie rule is lexicographic on the 5-digit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ZoneId {
    pub code: ZoneCode,
    pub state: StateCode,
}

impl ZoneId {
    pub fn new(code: ZoneCode, state: StateCode) -> Self {
        Self { code, state }
    }

    /// Checks the state against the configured set.
    pub fn in_states(&self, states: &[StateCode]) -> bool {
        states.contains(&self.state)
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.state, self.code)
    }
}

/// Closed ring of `[lon, lat]` positions.
pub type Ring = Vec<[f64; 2]>;

/// Zone geometry. Rings are stored flat and interpreted with the even-odd
/// rule, so holes and multi-part zones need no extra structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonePolygon {
    pub zone: ZoneId,
    pub rings: Vec<Ring>,
    pub land_area_m2: f64,
}

impl ZonePolygon {
    pub fn new(zone: ZoneId, rings: Vec<Ring>, land_area_m2: f64) -> Result<Self, ModelError> {
        for ring in &rings {
            if ring.len() < 4 {
                return Err(ModelError::DegenerateRing { zone: zone.code, vertices: ring.len() });
            }
            if ring.first() != ring.last() {
                return Err(ModelError::OpenRing(zone.code));
            }
            if ring.iter().flatten().any(|c| !c.is_finite()) {
                return Err(ModelError::NonFiniteCoordinate(zone.code));
            }
        }
        if !land_area_m2.is_finite() || land_area_m2 < 0.0 {
            return Err(ModelError::NegativeArea(zone.code));
        }
        Ok(Self { zone, rings, land_area_m2 })
    }

    pub fn is_degenerate(&self) -> bool {
        self.land_area_m2 == 0.0
    }

    /// `[min_lon, min_lat, max_lon, max_lat]` over all rings.
    pub fn bbox(&self) -> [f64; 4] {
        let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in self.rings.iter().flatten() {
            bb[0] = bb[0].min(p[0]);
            bb[1] = bb[1].min(p[1]);
            bb[2] = bb[2].max(p[0]);
            bb[3] = bb[3].max(p[1]);
        }
        bb
    }
}
