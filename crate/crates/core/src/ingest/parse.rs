//! Delimited-text and newline-delimited-JSON parsers, one per source.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{StateCode, ZoneCode, ZoneId};

use super::records::*;
use super::IngestError;

/// A non-fatal per-line note. Every input line ends up as a record, a
/// warning, or an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub warnings: Vec<ParseWarning>,
    /// Non-header, non-blank input lines seen.
    pub lines: u64,
    /// Cells that were present but unusable and are now `None`.
    pub missing_cells: u64,
}

impl<T> Default for Parsed<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Parsed<T> {
    pub fn new() -> Self {
        Self { records: Vec::new(), warnings: Vec::new(), lines: 0, missing_cells: 0 }
    }

    fn warn(&mut self, line: u64, message: impl Into<String>) {
        self.warnings.push(ParseWarning { line, message: message.into() });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParseOptions {
    /// Single-byte field separator.
    pub delimiter: char,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { delimiter: ',' }
    }
}

/// One housing year-built bin. `end: None` means "through the base year".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearBuiltBin {
    pub column: String,
    pub start: i32,
    pub end: Option<i32>,
}

impl YearBuiltBin {
    fn new(column: &str, start: i32, end: Option<i32>) -> Self {
        Self { column: column.into(), start, end }
    }

    pub fn midpoint_year(&self, base_year: i32) -> f64 {
        (f64::from(self.start) + f64::from(self.end.unwrap_or(base_year))) / 2.0
    }
}

/// Maps record fields to source column names. Fields not listed in
/// `columns` are read from a column of the same name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CensusSchema {
    pub columns: BTreeMap<String, String>,
    pub year_built: Vec<YearBuiltBin>,
}

impl Default for CensusSchema {
    fn default() -> Self {
        Self {
            columns: BTreeMap::new(),
            year_built: vec![
                YearBuiltBin::new("built_2010_later", 2010, None),
                YearBuiltBin::new("built_2000_2009", 2000, Some(2009)),
                YearBuiltBin::new("built_1990_1999", 1990, Some(1999)),
                YearBuiltBin::new("built_1980_1989", 1980, Some(1989)),
                YearBuiltBin::new("built_1970_1979", 1970, Some(1979)),
                YearBuiltBin::new("built_1960_1969", 1960, Some(1969)),
                YearBuiltBin::new("built_1950_1959", 1950, Some(1959)),
                YearBuiltBin::new("built_1940_1949", 1940, Some(1949)),
                YearBuiltBin::new("built_1939_earlier", 1900, Some(1939)),
            ],
        }
    }
}

impl CensusSchema {
    fn column<'a>(&'a self, field: &'a str) -> &'a str {
        self.columns.get(field).map_or(field, String::as_str)
    }
}

/// `(field, required)`; the optional ones feed auxiliary columns or
/// alternative denominators.
const CENSUS_FIELDS: [(&str, bool); 30] = [
    ("zone", true),
    ("state", true),
    ("total_population", true),
    ("white", true),
    ("black", true),
    ("native", true),
    ("asian", true),
    ("age_25_34", true),
    ("college", true),
    ("bachelor", true),
    ("graduate", true),
    ("population_25_plus", false),
    ("sci_tech", true),
    ("median_age", true),
    ("median_income", true),
    ("unemployment_rate", true),
    ("poverty_rate", true),
    ("median_home_value", true),
    ("occupied_housing_units", true),
    ("housing_total", true),
    ("car_truck_van", true),
    ("public_transit", true),
    ("walk", true),
    ("bike", true),
    ("worked_from_home", true),
    ("worked_outside_state", true),
    ("worked_in_state", false),
    ("worked_in_county", false),
    ("worked_outside_county", false),
    ("worked_in_place", false),
];

fn reader(path: &Path, opts: &ParseOptions) -> Result<csv::Reader<File>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::Io { path: path.display().to_string(), source: e })?;
    Ok(csv::ReaderBuilder::new().delimiter(opts.delimiter as u8).trim(csv::Trim::All).from_reader(file))
}

fn headers(rdr: &mut csv::Reader<File>) -> Result<HashMap<String, usize>, IngestError> {
    let h = rdr.headers().map_err(|e| IngestError::MalformedRow { line: 1, reason: e.to_string() })?;
    Ok(h.iter().enumerate().map(|(i, name)| (name.to_string(), i)).collect())
}

fn require(cols: &HashMap<String, usize>, names: &[&str], field: &str) -> Result<usize, IngestError> {
    names.iter().find_map(|n| cols.get(*n).copied()).ok_or_else(|| IngestError::MissingColumn(field.to_string()))
}

fn records(rdr: &mut csv::Reader<File>) -> impl Iterator<Item = Result<(u64, csv::StringRecord), IngestError>> + '_ {
    rdr.records().map(|r| {
        r.map(|rec| (rec.position().map_or(0, |p| p.line()), rec)).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IngestError::MalformedRow { line, reason: e.to_string() }
        })
    })
}

fn blank(rec: &csv::StringRecord) -> bool {
    rec.iter().all(str::is_empty)
}

fn missing_marker(s: &str) -> bool {
    matches!(s, "" | "NA" | "N/A" | "-" | "null" | "(X)")
}

fn count_cell(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let f = s.replace(',', "").parse::<f64>().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < 9.0e15).then_some(f as u64)
}

fn real_cell(s: &str) -> Option<f64> {
    s.replace(['$', ','], "").parse::<f64>().ok().filter(|v| v.is_finite())
}

fn zone_cell(s: &str, line: u64) -> Result<ZoneCode, IngestError> {
    ZoneCode::parse_lenient(s).map_err(|e| IngestError::MalformedRow { line, reason: e.to_string() })
}

/// Parses an ACS-style profile table: one row per zone.
pub fn parse_census(
    path: &Path,
    schema: &CensusSchema,
    opts: &ParseOptions,
) -> Result<Parsed<CensusRecord>, IngestError> {
    let mut rdr = reader(path, opts)?;
    let cols = headers(&mut rdr)?;
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (field, required) in CENSUS_FIELDS {
        match cols.get(schema.column(field)) {
            Some(&i) => {
                index.insert(field, i);
            }
            None if required => return Err(IngestError::MissingColumn(field.to_string())),
            None => {}
        }
    }
    let bins = schema
        .year_built
        .iter()
        .map(|b| cols.get(&b.column).copied().ok_or_else(|| IngestError::MissingColumn(b.column.clone())))
        .collect::<Result<Vec<usize>, _>>()?;

    let mut out = Parsed::new();
    let mut seen = HashSet::new();
    for row in records(&mut rdr) {
        let (line, rec) = row?;
        if blank(&rec) {
            continue;
        }
        out.lines += 1;
        let raw = |field: &str| index.get(field).map(|&i| rec.get(i).unwrap_or(""));
        let code = zone_cell(raw("zone").unwrap_or(""), line)?;
        let state = StateCode::new(raw("state").unwrap_or(""))
            .map_err(|e| IngestError::MalformedRow { line, reason: e.to_string() })?;
        if !seen.insert(code) {
            return Err(IngestError::DuplicateZone(code));
        }

        let mut missing = 0u64;
        let mut count = |field: &str| -> Option<u64> {
            let s = raw(field)?;
            let v = count_cell(s);
            if v.is_none() && !missing_marker(s) {
                missing += 1;
            }
            v
        };
        let mut r = CensusRecord {
            zone: ZoneId::new(code, state),
            total_population: count("total_population"),
            white: count("white"),
            black: count("black"),
            native: count("native"),
            asian: count("asian"),
            age_25_34: count("age_25_34"),
            college: count("college"),
            bachelor: count("bachelor"),
            graduate: count("graduate"),
            population_25_plus: count("population_25_plus"),
            sci_tech: count("sci_tech"),
            median_age: None,
            median_income: None,
            unemployment_rate: None,
            poverty_rate: None,
            median_home_value: None,
            occupied_housing_units: count("occupied_housing_units"),
            housing_total: count("housing_total"),
            car_truck_van: count("car_truck_van"),
            public_transit: count("public_transit"),
            walk: count("walk"),
            bike: count("bike"),
            worked_from_home: count("worked_from_home"),
            worked_outside_state: count("worked_outside_state"),
            worked_in_state: count("worked_in_state"),
            worked_in_county: count("worked_in_county"),
            worked_outside_county: count("worked_outside_county"),
            worked_in_place: count("worked_in_place"),
            year_built: Vec::new(),
        };
        r.year_built = bins
            .iter()
            .map(|&i| {
                let s = rec.get(i).unwrap_or("");
                let v = count_cell(s);
                if v.is_none() && !missing_marker(s) {
                    missing += 1;
                }
                v
            })
            .collect();
        let mut real = |field: &str| -> Option<f64> {
            let s = raw(field)?;
            let v = real_cell(s);
            if v.is_none() && !missing_marker(s) {
                missing += 1;
            }
            v
        };
        r.median_age = real("median_age");
        r.median_income = real("median_income");
        r.unemployment_rate = real("unemployment_rate");
        r.poverty_rate = real("poverty_rate");
        r.median_home_value = real("median_home_value");

        missing += enforce_census_bounds(&mut r);
        out.missing_cells += missing;
        out.records.push(r);
    }
    Ok(out)
}

/// Blanks cells that break the record invariants: sub-counts above the
/// population, rates outside [0, 1]. Returns how many were blanked.
fn enforce_census_bounds(r: &mut CensusRecord) -> u64 {
    let mut blanked = 0;
    if let Some(pop) = r.total_population {
        for cell in [
            &mut r.white,
            &mut r.black,
            &mut r.native,
            &mut r.asian,
            &mut r.age_25_34,
            &mut r.college,
            &mut r.bachelor,
            &mut r.graduate,
            &mut r.population_25_plus,
            &mut r.sci_tech,
            &mut r.car_truck_van,
            &mut r.public_transit,
            &mut r.walk,
            &mut r.bike,
            &mut r.worked_from_home,
            &mut r.worked_outside_state,
            &mut r.worked_in_state,
            &mut r.worked_in_county,
            &mut r.worked_outside_county,
            &mut r.worked_in_place,
        ] {
            if cell.is_some_and(|v| v > pop) {
                *cell = None;
                blanked += 1;
            }
        }
    }
    for cell in [&mut r.unemployment_rate, &mut r.poverty_rate] {
        if cell.is_some_and(|v| !(0.0..=1.0).contains(&v)) {
            *cell = None;
            blanked += 1;
        }
    }
    if let (Some(occ), Some(total)) = (r.occupied_housing_units, r.housing_total) {
        if occ > total {
            r.occupied_housing_units = None;
            blanked += 1;
        }
    }
    blanked
}

/// Inclusive date range patents must be granted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn year(year: i32) -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year"),
            end: NaiveDate::from_ymd_opt(year, 12, 31).expect("valid year"),
        }
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }
}

fn optional_coord(rec: &csv::StringRecord, col: Option<usize>, line: u64) -> Result<Option<f64>, IngestError> {
    let Some(s) = col.and_then(|i| rec.get(i)) else { return Ok(None) };
    if missing_marker(s) {
        return Ok(None);
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| IngestError::MalformedRow { line, reason: format!("bad coordinate `{s}`") })
}

/// Parses granted-patent rows; rows outside `window` are dropped with a
/// warning.
pub fn parse_patents(
    path: &Path,
    window: DateWindow,
    opts: &ParseOptions,
) -> Result<Parsed<PatentRecord>, IngestError> {
    let mut rdr = reader(path, opts)?;
    let cols = headers(&mut rdr)?;
    let rf = require(&cols, &["rf_id", "rfid"], "rf_id")?;
    let zone = require(&cols, &["zone", "zip", "zipcode"], "zone")?;
    let date = require(&cols, &["grant_date", "date"], "grant_date")?;
    let lon = cols.get("lon").copied();
    let lat = cols.get("lat").copied();

    let mut out = Parsed::new();
    for row in records(&mut rdr) {
        let (line, rec) = row?;
        if blank(&rec) {
            continue;
        }
        out.lines += 1;
        let rf_id = rec.get(rf).unwrap_or("").to_string();
        if rf_id.is_empty() {
            return Err(IngestError::MalformedRow { line, reason: "empty rf_id".into() });
        }
        let zone = zone_cell(rec.get(zone).unwrap_or(""), line)?;
        let ds = rec.get(date).unwrap_or("");
        let grant_date = NaiveDate::parse_from_str(ds, "%Y-%m-%d")
            .map_err(|_| IngestError::MalformedRow { line, reason: format!("bad date `{ds}`") })?;
        let (lon, lat) = match (optional_coord(&rec, lon, line)?, optional_coord(&rec, lat, line)?) {
            (Some(x), Some(y)) => (Some(x), Some(y)),
            (None, None) => (None, None),
            _ => {
                out.warn(line, "only one coordinate present; falling back to zone");
                continue;
            }
        };
        if !window.contains(grant_date) {
            out.warn(line, format!("grant date {grant_date} outside {}..={}", window.start, window.end));
            continue;
        }
        out.records.push(PatentRecord { rf_id, zone, grant_date, lon, lat });
    }
    Ok(out)
}

/// Parses newline-delimited JSON POIs of one kind:
/// `{"tag": "park", "name": "...", "lon": -71.1, "lat": 42.3, "area_m2": 8093.7}`.
/// Innovation spaces may carry `"keyword"`; otherwise the name is matched.
pub fn parse_poi(path: &Path, kind: PoiKind) -> Result<Parsed<PoiRecord>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::Io { path: path.display().to_string(), source: e })?;
    let mut out = Parsed::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| IngestError::Io { path: path.display().to_string(), source: e })?;
        if line.trim().is_empty() {
            continue;
        }
        out.lines += 1;
        let bad = |reason: &str| IngestError::MalformedRow { line: line_no, reason: reason.to_string() };
        let v: Value = serde_json::from_str(&line).map_err(|e| bad(&e.to_string()))?;
        let tag = v.get("tag").and_then(Value::as_str).ok_or_else(|| bad("missing tag"))?;
        if tag != kind.tag() {
            out.warn(line_no, format!("tag `{tag}` is not `{kind}`"));
            continue;
        }
        let lon = v.get("lon").and_then(Value::as_f64).ok_or_else(|| bad("missing lon"))?;
        let lat = v.get("lat").and_then(Value::as_f64).ok_or_else(|| bad("missing lat"))?;
        let name = v.get("name").and_then(Value::as_str).unwrap_or("").to_string();
        let area = v.get("area_m2").filter(|a| !a.is_null());
        let area_m2 = match (kind.has_area(), area) {
            (true, Some(a)) => {
                let a = a.as_f64().filter(|a| *a >= 0.0).ok_or_else(|| bad("area_m2 must be a nonnegative number"))?;
                Some(a)
            }
            (true, None) => {
                out.warn(line_no, format!("{kind} without area_m2 skipped"));
                continue;
            }
            (false, Some(_)) => {
                out.warn(line_no, format!("area_m2 ignored for {kind}"));
                None
            }
            (false, None) => None,
        };
        let matched_keyword = if kind == PoiKind::InnovationSpace {
            let given = v.get("keyword").and_then(Value::as_str).map(str::to_string);
            match given.or_else(|| match_keyword(&name, &INNOVATION_KEYWORDS).map(str::to_string)) {
                Some(k) => Some(k),
                None => {
                    out.warn(line_no, format!("no innovation keyword matches `{name}`"));
                    continue;
                }
            }
        } else {
            None
        };
        out.records.push(PoiRecord { kind, name, lon, lat, area_m2, matched_keyword });
    }
    Ok(out)
}

/// Parses firm R&D rows (`addzip`, `xrd` in millions, optional `fyear`).
/// Rows from other fiscal years, or with blank or negative `xrd`, are
/// dropped with a warning.
pub fn parse_rnd(path: &Path, base_year: i32, opts: &ParseOptions) -> Result<Parsed<RnDRecord>, IngestError> {
    let mut rdr = reader(path, opts)?;
    let cols = headers(&mut rdr)?;
    let zone = require(&cols, &["addzip", "zone", "zip"], "addzip")?;
    let xrd = require(&cols, &["xrd"], "xrd")?;
    let year = cols.get("fyear").copied();

    let mut out = Parsed::new();
    for row in records(&mut rdr) {
        let (line, rec) = row?;
        if blank(&rec) {
            continue;
        }
        out.lines += 1;
        let z = zone_cell(rec.get(zone).unwrap_or(""), line)?;
        let y = match year.and_then(|i| rec.get(i)).filter(|s| !s.is_empty()) {
            Some(s) => Some(
                s.parse::<i32>().map_err(|_| IngestError::MalformedRow { line, reason: format!("bad fyear `{s}`") })?,
            ),
            None => None,
        };
        if y.is_some_and(|y| y != base_year) {
            out.warn(line, format!("fiscal year {} is not {base_year}", y.unwrap_or_default()));
            continue;
        }
        match rec.get(xrd).and_then(real_cell) {
            Some(v) if v >= 0.0 => out.records.push(RnDRecord { zone: z, xrd: v, year: y }),
            _ => out.warn(line, "missing or negative xrd"),
        }
    }
    Ok(out)
}

/// Parses H-1B labor condition applications (zone, case status).
pub fn parse_h1b(path: &Path, opts: &ParseOptions) -> Result<Parsed<H1bRecord>, IngestError> {
    let mut rdr = reader(path, opts)?;
    let cols = headers(&mut rdr)?;
    let zone = require(&cols, &["zone", "zip", "worksite_postal_code", "employer_postal_code"], "zone")?;
    let status = require(&cols, &["status", "case_status"], "status")?;

    let mut out = Parsed::new();
    for row in records(&mut rdr) {
        let (line, rec) = row?;
        if blank(&rec) {
            continue;
        }
        out.lines += 1;
        let z = zone_cell(rec.get(zone).unwrap_or(""), line)?;
        let s = rec
            .get(status)
            .unwrap_or("")
            .parse::<H1bStatus>()
            .map_err(|reason| IngestError::MalformedRow { line, reason })?;
        out.records.push(H1bRecord { zone: z, status: s });
    }
    Ok(out)
}

/// Parses startup formation rates (zone, year, sfr). A zone may appear once
/// per year.
pub fn parse_sfr(path: &Path, opts: &ParseOptions) -> Result<Parsed<SfrRecord>, IngestError> {
    let mut rdr = reader(path, opts)?;
    let cols = headers(&mut rdr)?;
    let zone = require(&cols, &["zone", "zip", "zipcode"], "zone")?;
    let year = require(&cols, &["year"], "year")?;
    let sfr = require(&cols, &["sfr"], "sfr")?;

    let mut out = Parsed::new();
    let mut seen = HashSet::new();
    for row in records(&mut rdr) {
        let (line, rec) = row?;
        if blank(&rec) {
            continue;
        }
        out.lines += 1;
        let z = zone_cell(rec.get(zone).unwrap_or(""), line)?;
        let y_raw = rec.get(year).unwrap_or("");
        let y = y_raw
            .parse::<i32>()
            .map_err(|_| IngestError::MalformedRow { line, reason: format!("bad year `{y_raw}`") })?;
        match rec.get(sfr).and_then(real_cell) {
            Some(v) if v >= 0.0 => {
                if !seen.insert((z, y)) {
                    return Err(IngestError::DuplicateZone(z));
                }
                out.records.push(SfrRecord { zone: z, year: y, sfr: v });
            }
            _ => out.warn(line, "missing or negative sfr"),
        }
    }
    Ok(out)
}

/// Parses business registration events (zone, year); other years are
/// dropped with a warning.
pub fn parse_business(path: &Path, base_year: i32, opts: &ParseOptions) -> Result<Parsed<BizRegRecord>, IngestError> {
    let mut rdr = reader(path, opts)?;
    let cols = headers(&mut rdr)?;
    let zone = require(&cols, &["zone", "zip", "zipcode"], "zone")?;
    let year = require(&cols, &["year"], "year")?;

    let mut out = Parsed::new();
    for row in records(&mut rdr) {
        let (line, rec) = row?;
        if blank(&rec) {
            continue;
        }
        out.lines += 1;
        let z = zone_cell(rec.get(zone).unwrap_or(""), line)?;
        let y_raw = rec.get(year).unwrap_or("");
        let y = y_raw
            .parse::<i32>()
            .or_else(|_| NaiveDate::parse_from_str(y_raw, "%Y-%m-%d").map(|d| d.year()))
            .map_err(|_| IngestError::MalformedRow { line, reason: format!("bad year `{y_raw}`") })?;
        if y != base_year {
            out.warn(line, format!("registration year {y} is not {base_year}"));
            continue;
        }
        out.records.push(BizRegRecord { zone: z, year: y });
    }
    Ok(out)
}
