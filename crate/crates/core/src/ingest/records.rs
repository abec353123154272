use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::model::{ZoneCode, ZoneId};

/// ACS-style zone profile. `None` marks a cell that was absent or failed to
/// parse; it is masked downstream rather than dropping the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub zone: ZoneId,
    pub total_population: Option<u64>,
    pub white: Option<u64>,
    pub black: Option<u64>,
    pub native: Option<u64>,
    pub asian: Option<u64>,
    pub age_25_34: Option<u64>,
    pub college: Option<u64>,
    pub bachelor: Option<u64>,
    pub graduate: Option<u64>,
    pub population_25_plus: Option<u64>,
    pub sci_tech: Option<u64>,
    pub median_age: Option<f64>,
    pub median_income: Option<f64>,
    pub unemployment_rate: Option<f64>,
    pub poverty_rate: Option<f64>,
    pub median_home_value: Option<f64>,
    pub occupied_housing_units: Option<u64>,
    pub housing_total: Option<u64>,
    pub car_truck_van: Option<u64>,
    pub public_transit: Option<u64>,
    pub walk: Option<u64>,
    pub bike: Option<u64>,
    pub worked_from_home: Option<u64>,
    pub worked_outside_state: Option<u64>,
    pub worked_in_state: Option<u64>,
    pub worked_in_county: Option<u64>,
    pub worked_outside_county: Option<u64>,
    pub worked_in_place: Option<u64>,
    /// Housing units per year-built bin, aligned with the schema's bins.
    pub year_built: Vec<Option<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatentRecord {
    pub rf_id: String,
    pub zone: ZoneCode,
    pub grant_date: NaiveDate,
    pub lon: Option<f64>,
    pub lat: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoiKind {
    School,
    University,
    Cafe,
    Park,
    Square,
    BusStop,
    InnovationSpace,
}

impl PoiKind {
    pub const ALL: [PoiKind; 7] = [
        PoiKind::School,
        PoiKind::University,
        PoiKind::Cafe,
        PoiKind::Park,
        PoiKind::Square,
        PoiKind::BusStop,
        PoiKind::InnovationSpace,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PoiKind::School => "school",
            PoiKind::University => "university",
            PoiKind::Cafe => "cafe",
            PoiKind::Park => "park",
            PoiKind::Square => "square",
            PoiKind::BusStop => "bus_stop",
            PoiKind::InnovationSpace => "innovation_space",
        }
    }

    pub fn has_area(self) -> bool {
        matches!(self, PoiKind::Park | PoiKind::Square)
    }
}

impl fmt::Display for PoiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PoiKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PoiKind::ALL.into_iter().find(|k| k.tag() == s).ok_or_else(|| format!("unknown POI kind `{s}`"))
    }
}

/// Name keywords that identify innovation spaces, in match priority order.
pub const INNOVATION_KEYWORDS: [&str; 9] = [
    "accelerator",
    "co-working space",
    "incubator",
    "innovation center",
    "innovation hub",
    "innovation park",
    "start-up",
    "tech hub",
    "technology park",
];

/// First keyword (in list order) occurring in `name`, case-insensitively.
pub fn match_keyword<'a>(name: &str, keywords: &[&'a str]) -> Option<&'a str> {
    let lower = name.to_lowercase();
    keywords.iter().copied().find(|k| lower.contains(&k.to_lowercase()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiRecord {
    pub kind: PoiKind,
    pub name: String,
    pub lon: f64,
    pub lat: f64,
    /// Present for parks and squares only.
    pub area_m2: Option<f64>,
    /// Present for innovation spaces only.
    pub matched_keyword: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RnDRecord {
    pub zone: ZoneCode,
    /// Annual R&D expenditure, millions.
    pub xrd: f64,
    pub year: Option<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum H1bStatus {
    Certified,
    Denied,
    Withdrawn,
}

impl FromStr for H1bStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let l = s.trim().to_ascii_lowercase();
        // OFLC's "CERTIFIED-WITHDRAWN" is a withdrawal
        if l.contains("withdrawn") {
            Ok(H1bStatus::Withdrawn)
        } else if l.contains("denied") {
            Ok(H1bStatus::Denied)
        } else if l.contains("certified") {
            Ok(H1bStatus::Certified)
        } else {
            Err(format!("unknown case status `{s}`"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1bRecord {
    pub zone: ZoneCode,
    pub status: H1bStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfrRecord {
    pub zone: ZoneCode,
    pub year: i32,
    pub sfr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BizRegRecord {
    pub zone: ZoneCode,
    pub year: i32,
}
