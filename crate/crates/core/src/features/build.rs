use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ingest::{
    BizRegRecord, CensusRecord, CensusSchema, H1bRecord, H1bStatus, PatentRecord, PoiKind, PoiRecord, RnDRecord,
    SfrRecord, YearBuiltBin,
};
use crate::model::{FeatureCatalog, FeatureMatrix, Outcome, StateCode, ZoneCode, ZoneId, AUX_COLUMNS};
use crate::spatial::{acres, contains, population_density, DensityUnit, ZoneIndex};

use super::formulas::{building_age_indicators, commute_shares, dedup_patents, per_1000, share};
use super::FeatureError;

/// Parsed, state-filtered records from every source.
#[derive(Debug, Clone, Default)]
pub struct Sources {
    pub census: Vec<CensusRecord>,
    pub patents: Vec<PatentRecord>,
    pub pois: Vec<PoiRecord>,
    pub rnd: Vec<RnDRecord>,
    pub h1b: Vec<H1bRecord>,
    pub sfr: Vec<SfrRecord>,
    pub business: Vec<BizRegRecord>,
}

/// Denominator for the college/bachelor/graduate shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EducationDenominator {
    #[default]
    TotalPopulation,
    Population25Plus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub states: Vec<StateCode>,
    pub base_year: i32,
    pub outcome_year: i32,
    pub allow_custom_lag: bool,
    pub density_unit: DensityUnit,
    pub education_denominator: EducationDenominator,
    pub h1b_certified_only: bool,
    pub year_built: Vec<YearBuiltBin>,
}

pub const REQUIRED_LAG: i32 = 4;

impl BuildOptions {
    pub fn new(states: Vec<StateCode>, base_year: i32, outcome_year: i32) -> Self {
        Self {
            states,
            base_year,
            outcome_year,
            allow_custom_lag: false,
            density_unit: DensityUnit::default(),
            education_denominator: EducationDenominator::default(),
            h1b_certified_only: false,
            year_built: CensusSchema::default().year_built,
        }
    }

    pub fn check_lag(&self) -> Result<(), FeatureError> {
        let found = self.outcome_year - self.base_year;
        if found == REQUIRED_LAG || (self.allow_custom_lag && found > 0) {
            Ok(())
        } else {
            Err(FeatureError::LagMismatch { expected: REQUIRED_LAG, found })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// Census zone outside the configured states.
    OutOfScope,
    /// Census zone with no polygon.
    NoPolygon,
    /// Polygon zone absent from the census.
    NotInCensus,
    /// Zero or unknown population, so no per-resident outcome.
    NoPopulation,
    /// No startup formation rate for the outcome year.
    MissingSfr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceJoin {
    pub source: String,
    pub records: usize,
    pub matched: usize,
}

/// How the zone universe was formed and where each source landed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct JoinReport {
    pub census_zones: usize,
    pub polygon_zones: usize,
    pub output_zones: usize,
    pub sources: Vec<SourceJoin>,
    pub dropped: Vec<(ZoneId, DropReason)>,
    pub masked_cells: BTreeMap<String, usize>,
}

impl JoinReport {
    /// Plain-text rendering, one fact per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "census_zones\t{}", self.census_zones);
        let _ = writeln!(s, "polygon_zones\t{}", self.polygon_zones);
        let _ = writeln!(s, "output_zones\t{}", self.output_zones);
        for src in &self.sources {
            let _ = writeln!(
                s,
                "source\t{}\trecords={}\tmatched={}\tunmatched={}",
                src.source,
                src.records,
                src.matched,
                src.records - src.matched
            );
        }
        for (zone, why) in &self.dropped {
            let _ = writeln!(s, "dropped\t{zone}\t{why:?}");
        }
        for (col, n) in &self.masked_cells {
            let _ = writeln!(s, "masked\t{col}\t{n}");
        }
        s
    }
}

/// Per-zone tallies gathered from the non-census sources.
#[derive(Debug, Clone, Default)]
pub struct ZoneAccumulator {
    pub patent_ids: BTreeSet<String>,
    pub poi_counts: BTreeMap<PoiKind, u64>,
    pub park_area_m2: f64,
    pub square_area_m2: f64,
    pub rnd_sum: f64,
    pub h1b: u64,
    pub business: u64,
    pub sfr: Option<f64>,
}

impl ZoneAccumulator {
    fn pois(&self, kind: PoiKind) -> f64 {
        self.poi_counts.get(&kind).copied().unwrap_or(0) as f64
    }
}

/// Joins every source onto the census ∩ polygon zone universe and fills
/// the catalog columns. Rows come out sorted by zone.
pub fn build_matrix(
    sources: &Sources,
    index: &ZoneIndex,
    catalog: &FeatureCatalog,
    opts: &BuildOptions,
) -> Result<(FeatureMatrix, JoinReport), FeatureError> {
    opts.check_lag()?;
    if sources.census.is_empty() {
        return Err(FeatureError::NoCensus);
    }
    let mut report =
        JoinReport { census_zones: sources.census.len(), polygon_zones: index.len(), ..JoinReport::default() };

    let polygon_zones: BTreeSet<ZoneId> = index.polygons().iter().map(|p| p.zone).collect();
    let census_zones: BTreeSet<ZoneId> = sources.census.iter().map(|c| c.zone).collect();
    for z in &polygon_zones {
        if z.in_states(&opts.states) && !census_zones.contains(z) {
            report.dropped.push((*z, DropReason::NotInCensus));
        }
    }

    let mut census: Vec<&CensusRecord> = Vec::new();
    for c in &sources.census {
        let why = if !c.zone.in_states(&opts.states) {
            Some(DropReason::OutOfScope)
        } else if !polygon_zones.contains(&c.zone) {
            Some(DropReason::NoPolygon)
        } else if c.total_population.unwrap_or(0) == 0 {
            Some(DropReason::NoPopulation)
        } else {
            None
        };
        match why {
            Some(why) => report.dropped.push((c.zone, why)),
            None => census.push(c),
        }
    }
    census.sort_by_key(|c| c.zone);

    let by_code: HashMap<ZoneCode, usize> = census.iter().enumerate().map(|(i, c)| (c.zone.code, i)).collect();
    let by_id: HashMap<ZoneId, usize> = census.iter().enumerate().map(|(i, c)| (c.zone, i)).collect();
    let mut acc = vec![ZoneAccumulator::default(); census.len()];

    let mut tally = |name: &str, records: usize, matched: usize| {
        report.sources.push(SourceJoin { source: name.into(), records, matched });
    };

    let pairs = dedup_patents(&sources.patents);
    let mut matched = 0;
    for (rf, code) in &pairs {
        if let Some(&i) = by_code.get(code) {
            acc[i].patent_ids.insert(rf.clone());
            matched += 1;
        }
    }
    tally("patents", pairs.len(), matched);

    let mut matched = 0;
    for p in &sources.pois {
        // smallest containing zone among those kept, so a point on a state
        // line counts for the in-scope side
        let point = [p.lon, p.lat];
        let hit = index
            .candidates(point)
            .filter(|poly| by_id.contains_key(&poly.zone) && contains(&poly.rings, point))
            .map(|poly| poly.zone)
            .min();
        let Some(&i) = hit.and_then(|z| by_id.get(&z)) else { continue };
        matched += 1;
        let a = &mut acc[i];
        *a.poi_counts.entry(p.kind).or_insert(0) += 1;
        match p.kind {
            PoiKind::Park => a.park_area_m2 += p.area_m2.unwrap_or(0.0),
            PoiKind::Square => a.square_area_m2 += p.area_m2.unwrap_or(0.0),
            _ => {}
        }
    }
    tally("poi", sources.pois.len(), matched);

    let mut matched = 0;
    for r in &sources.rnd {
        if let Some(&i) = by_code.get(&r.zone) {
            acc[i].rnd_sum += r.xrd;
            matched += 1;
        }
    }
    tally("rnd", sources.rnd.len(), matched);

    let mut matched = 0;
    for h in &sources.h1b {
        if opts.h1b_certified_only && h.status != H1bStatus::Certified {
            continue;
        }
        if let Some(&i) = by_code.get(&h.zone) {
            acc[i].h1b += 1;
            matched += 1;
        }
    }
    tally("h1b", sources.h1b.len(), matched);

    let mut matched = 0;
    for b in &sources.business {
        if b.year != opts.base_year {
            continue;
        }
        if let Some(&i) = by_code.get(&b.zone) {
            acc[i].business += 1;
            matched += 1;
        }
    }
    tally("business", sources.business.len(), matched);

    let mut matched = 0;
    for s in &sources.sfr {
        if s.year != opts.outcome_year {
            continue;
        }
        if let Some(&i) = by_code.get(&s.zone) {
            acc[i].sfr = Some(s.sfr);
            matched += 1;
        }
    }
    tally("sfr", sources.sfr.len(), matched);

    let p = catalog.len();
    let col = |name: &str| catalog.index_of(name).unwrap_or_else(|| panic!("catalog lacks `{name}`"));
    let mut m = FeatureMatrix {
        zones: Vec::new(),
        values: Vec::new(),
        mask: Vec::new(),
        outcomes: Vec::new(),
        aux: Vec::new(),
        base_year: opts.base_year,
        outcome_year: opts.outcome_year,
    };
    let mut masked = vec![0usize; p];

    for (c, a) in census.iter().zip(&acc) {
        let Some(sfr) = a.sfr else {
            report.dropped.push((c.zone, DropReason::MissingSfr));
            continue;
        };
        let pop = c.total_population.unwrap_or(0);
        let polygon = index.get(&c.zone).expect("joined zones have polygons");
        let mut row: Vec<Option<f64>> = vec![None; p];
        let mut set = |name: &str, v: Option<f64>| row[col(name)] = v;

        let pct = |v: Option<u64>| v.and_then(|v| share(v, pop).ok());
        let edu_denom = match opts.education_denominator {
            EducationDenominator::TotalPopulation => Some(pop),
            EducationDenominator::Population25Plus => c.population_25_plus,
        };
        let edu = |v: Option<u64>| match (v, edu_denom) {
            (Some(v), Some(d)) => share(v, d).ok(),
            _ => None,
        };
        let rate = |x: f64| per_1000(x, pop).ok();

        set("h1b_per_1000", rate(a.h1b as f64));
        set("sci_tech_pct", pct(c.sci_tech));
        set("white_pct", pct(c.white));
        set("black_pct", pct(c.black));
        set("native_pct", pct(c.native));
        set("asian_pct", pct(c.asian));
        set("age_25_34_pct", pct(c.age_25_34));
        set("college_pct", edu(c.college));
        set("bachelor_pct", edu(c.bachelor));
        set("graduate_pct", edu(c.graduate));
        set("population_density", population_density(pop as f64, polygon.land_area_m2, opts.density_unit).ok());

        set("median_age", c.median_age);
        set("median_income", c.median_income);
        set("unemployment_rate", c.unemployment_rate);
        set("poverty_pct", c.poverty_rate);
        set("median_home_value", c.median_home_value);
        set("rnd_per_1000", rate(a.rnd_sum));

        let occupied = match (c.occupied_housing_units, c.housing_total) {
            (Some(o), Some(t)) => share(o, t).ok(),
            _ => None,
        };
        set("occupied_housing_pct", occupied);
        set("schools_per_1000", rate(a.pois(PoiKind::School)));
        set("universities_per_1000", rate(a.pois(PoiKind::University)));
        set("business_registrations_per_1000", rate(a.business as f64));
        let age = building_age_indicators(&opts.year_built, &c.year_built, opts.base_year).ok();
        set("mean_building_age", age.map(|a| a.mean));
        set("mix_age_building_index", age.map(|a| a.mix));
        set("innovation_spaces_per_1000", rate(a.pois(PoiKind::InnovationSpace)));
        set("cafes_per_1000", rate(a.pois(PoiKind::Cafe)));

        set("parks_per_1000", rate(a.pois(PoiKind::Park)));
        set("squares_per_1000", rate(a.pois(PoiKind::Square)));
        set("park_acres_per_1000", rate(acres(a.park_area_m2)));
        set("square_acres_per_1000", rate(acres(a.square_area_m2)));

        let commute = commute_shares(c).ok();
        set("car_truck_van_pct", commute.and_then(|s| s.car_truck_van));
        set("public_transit_pct", commute.and_then(|s| s.public_transit));
        set("walk_bike_pct", commute.and_then(|s| s.walk_bike));
        set("worked_from_home_pct", commute.and_then(|s| s.worked_from_home));
        set("worked_outside_state_pct", commute.and_then(|s| s.worked_outside_state));
        set("bus_stops_per_1000", rate(a.pois(PoiKind::BusStop)));

        let patents = rate(a.patent_ids.len() as f64).ok_or(FeatureError::ZeroPopulation)?;
        let aux = [
            Some(pop as f64),
            age.map(|a| a.sd),
            commute.and_then(|s| s.worked_in_state),
            commute.and_then(|s| s.worked_in_county),
            commute.and_then(|s| s.worked_outside_county),
            commute.and_then(|s| s.worked_in_place),
        ];
        debug_assert_eq!(aux.len(), AUX_COLUMNS.len());

        for (k, v) in row.iter().enumerate() {
            if v.is_none() {
                masked[k] += 1;
            }
        }
        m.zones.push(c.zone);
        m.values.push(row.iter().map(|v| v.unwrap_or(0.0)).collect());
        m.mask.push(row.iter().map(Option::is_none).collect());
        let mut outcomes = [0.0; 2];
        outcomes[Outcome::Patents.index()] = patents;
        outcomes[Outcome::Sfr.index()] = sfr;
        m.outcomes.push(outcomes);
        m.aux.push(aux.to_vec());
    }

    report.output_zones = m.n_zones();
    report.dropped.sort();
    report.masked_cells =
        catalog.entries().iter().zip(&masked).filter(|(_, &n)| n > 0).map(|(s, &n)| (s.name.to_string(), n)).collect();
    Ok((m, report))
}
