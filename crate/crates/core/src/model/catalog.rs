//! The fixed 35-predictor neighborhood catalog.
//!
//! Canonical order follows the New York summary layout (Social, Economic,
//! Infrastructure, Urban Morphology, Urban Mobility), with cafés appended to
//! the Infrastructure block. Total population is a denominator and is not a
//! predictor.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const CATALOG_VERSION: &str = "lid-catalog-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureGroup {
    Social,
    Economic,
    Infrastructure,
    UrbanMorphology,
    UrbanMobility,
}

impl FeatureGroup {
    pub fn label(self) -> &'static str {
        match self {
            FeatureGroup::Social => "Social",
            FeatureGroup::Economic => "Economic",
            FeatureGroup::Infrastructure => "Infrastructure",
            FeatureGroup::UrbanMorphology => "Urban Morphology",
            FeatureGroup::UrbanMobility => "Urban Mobility",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    /// count × 1000 / population, must be ≥ 0
    PerThousand,
    /// share in [0, 1]
    Percentage,
    Level,
    Index,
}

impl FeatureKind {
    pub fn tag(self) -> &'static str {
        match self {
            FeatureKind::PerThousand => "per-1000-rate",
            FeatureKind::Percentage => "percentage",
            FeatureKind::Level => "level",
            FeatureKind::Index => "index",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: &'static str,
    pub label: &'static str,
    pub group: FeatureGroup,
    pub kind: FeatureKind,
}

/// Dependent variables, in matrix column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Patents,
    Sfr,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Patents, Outcome::Sfr];

    pub fn index(self) -> usize {
        match self {
            Outcome::Patents => 0,
            Outcome::Sfr => 1,
        }
    }

    /// Matrix column name.
    pub fn column(self) -> &'static str {
        match self {
            Outcome::Patents => "patents_per_1000",
            Outcome::Sfr => "sfr",
        }
    }

    /// Short name used in file names and on the command line.
    pub fn slug(self) -> &'static str {
        match self {
            Outcome::Patents => "patents",
            Outcome::Sfr => "sfr",
        }
    }

    pub fn label(self, outcome_year: i32) -> String {
        match self {
            Outcome::Patents => format!("Patents per 1000 residents ({outcome_year})"),
            Outcome::Sfr => format!("SFR ({outcome_year})"),
        }
    }
}

impl std::str::FromStr for Outcome {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "patents" | "patents_per_1000" => Ok(Outcome::Patents),
            "sfr" => Ok(Outcome::Sfr),
            other => Err(format!("unknown outcome `{other}`")),
        }
    }
}

macro_rules! spec {
    ($name:literal, $label:literal, $group:ident, $kind:ident) => {
        FeatureSpec { name: $name, label: $label, group: FeatureGroup::$group, kind: FeatureKind::$kind }
    };
}

const ENTRIES: [FeatureSpec; 35] = [
    spec!("h1b_per_1000", "H1B applications per 1000 residents", Social, PerThousand),
    spec!("sci_tech_pct", "Scientific technical pct", Social, Percentage),
    spec!("white_pct", "White pct", Social, Percentage),
    spec!("black_pct", "Black pct", Social, Percentage),
    spec!("native_pct", "Native pct", Social, Percentage),
    spec!("asian_pct", "Asian pct", Social, Percentage),
    spec!("age_25_34_pct", "25 to 34 years pct", Social, Percentage),
    spec!("college_pct", "College pct", Social, Percentage),
    spec!("bachelor_pct", "Bachelor pct", Social, Percentage),
    spec!("graduate_pct", "Graduate pct", Social, Percentage),
    spec!("population_density", "Population density", Social, Level),
    spec!("median_age", "Median age", Economic, Level),
    spec!("median_income", "Median income", Economic, Level),
    spec!("unemployment_rate", "Unemployment rate", Economic, Percentage),
    spec!("poverty_pct", "Poverty pct", Economic, Percentage),
    spec!("median_home_value", "Median home value", Economic, Level),
    spec!("rnd_per_1000", "R&D expenditure per 1000 residents", Economic, PerThousand),
    spec!("occupied_housing_pct", "Occupied housing units pct", Infrastructure, Percentage),
    spec!("schools_per_1000", "Schools per 1000 residents", Infrastructure, PerThousand),
    spec!("universities_per_1000", "Universities per 1000 residents", Infrastructure, PerThousand),
    spec!("business_registrations_per_1000", "Business registrations per 1000 residents", Infrastructure, PerThousand),
    spec!("mean_building_age", "Mean age of buildings", Infrastructure, Level),
    spec!("mix_age_building_index", "Mix age building index", Infrastructure, Index),
    spec!("innovation_spaces_per_1000", "Innovation spaces per 1000 residents", Infrastructure, PerThousand),
    spec!("cafes_per_1000", "Cafes per 1000 residents", Infrastructure, PerThousand),
    spec!("parks_per_1000", "Parks per 1000 residents", UrbanMorphology, PerThousand),
    spec!("squares_per_1000", "Squares per 1000 residents", UrbanMorphology, PerThousand),
    spec!("park_acres_per_1000", "Park land (acres) per 1000 residents", UrbanMorphology, PerThousand),
    spec!("square_acres_per_1000", "Square land (acres) per 1000 residents", UrbanMorphology, PerThousand),
    spec!("car_truck_van_pct", "Car truck van to work pct", UrbanMobility, Percentage),
    spec!("public_transit_pct", "Public transportation to work pct", UrbanMobility, Percentage),
    spec!("walk_bike_pct", "Walk bike to work pct", UrbanMobility, Percentage),
    spec!("worked_from_home_pct", "Worked from home pct", UrbanMobility, Percentage),
    spec!("worked_outside_state_pct", "Worked outside state of residence pct", UrbanMobility, Percentage),
    spec!("bus_stops_per_1000", "Bus stops per 1000 residents", UrbanMobility, PerThousand),
];

/// Auxiliary columns emitted next to the matrix but never trained on.
pub const AUX_COLUMNS: [&str; 6] = [
    "total_population",
    "building_age_sd",
    "worked_in_state_pct",
    "worked_in_county_pct",
    "worked_outside_county_pct",
    "worked_in_place_pct",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCatalog {
    entries: &'static [FeatureSpec],
}

/// The canonical catalog.
pub fn catalog_default() -> FeatureCatalog {
    FeatureCatalog { entries: &ENTRIES }
}

impl Default for FeatureCatalog {
    fn default() -> Self {
        catalog_default()
    }
}

impl FeatureCatalog {
    pub fn entries(&self) -> &[FeatureSpec] {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn outcomes(&self) -> [Outcome; 2] {
        Outcome::ALL
    }

    pub fn version(&self) -> &'static str {
        CATALOG_VERSION
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    pub fn count_in(&self, group: FeatureGroup) -> usize {
        self.entries.iter().filter(|e| e.group == group).count()
    }

    /// Versioned text export: a header line, then `name\tgroup\tkind\tlabel`.
    pub fn serialize(&self) -> String {
        let mut out = format!("# {}\nname\tgroup\tkind\tlabel\n", self.version());
        for e in self.entries {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", e.name, e.group.label(), e.kind.tag(), e.label));
        }
        out
    }
}
