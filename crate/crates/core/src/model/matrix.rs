use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use super::catalog::{FeatureCatalog, FeatureKind, Outcome, AUX_COLUMNS, CATALOG_VERSION};
use super::zone::{StateCode, ZoneCode, ZoneId};
use super::ModelError;

pub const MATRIX_FILE: &str = "matrix.tsv";
pub const MASK_FILE: &str = "matrix.mask.tsv";
pub const AUX_FILE: &str = "matrix.aux.tsv";

/// Zones × predictors, plus the two outcomes.
///
/// Missing predictor cells are flagged in `mask` and hold a `0.0`
/// sentinel in `values`; they never carry NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub zones: Vec<ZoneId>,
    pub values: Vec<Vec<f64>>,
    pub mask: Vec<Vec<bool>>,
    pub outcomes: Vec<[f64; 2]>,
    pub aux: Vec<Vec<Option<f64>>>,
    pub base_year: i32,
    pub outcome_year: i32,
}

impl FeatureMatrix {
    pub fn n_zones(&self) -> usize {
        self.zones.len()
    }

    pub fn n_features(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn lag(&self) -> i32 {
        self.outcome_year - self.base_year
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        (!self.mask[row][col]).then(|| self.values[row][col])
    }

    /// Unmasked values of one predictor column.
    pub fn column(&self, col: usize) -> Vec<Option<f64>> {
        (0..self.n_zones()).map(|r| self.get(r, col)).collect()
    }

    pub fn outcome(&self, outcome: Outcome) -> Vec<f64> {
        self.outcomes.iter().map(|o| o[outcome.index()]).collect()
    }

    pub fn row_complete(&self, row: usize) -> bool {
        !self.mask[row].iter().any(|&m| m)
    }

    /// Rows whose zone state is in `states`, order preserved.
    pub fn subset(&self, states: &[StateCode]) -> FeatureMatrix {
        let keep: Vec<usize> = (0..self.n_zones()).filter(|&r| self.zones[r].in_states(states)).collect();
        FeatureMatrix {
            zones: keep.iter().map(|&r| self.zones[r]).collect(),
            values: keep.iter().map(|&r| self.values[r].clone()).collect(),
            mask: keep.iter().map(|&r| self.mask[r].clone()).collect(),
            outcomes: keep.iter().map(|&r| self.outcomes[r]).collect(),
            aux: keep.iter().map(|&r| self.aux[r].clone()).collect(),
            base_year: self.base_year,
            outcome_year: self.outcome_year,
        }
    }

    /// Writes `matrix.tsv`, `matrix.mask.tsv` and `matrix.aux.tsv` into `dir`.
    ///
    /// Floats use the shortest round-trip representation, so reading the
    /// files back reproduces every value bit-for-bit.
    pub fn write_dir(&self, dir: &Path, catalog: &FeatureCatalog) -> Result<(), ModelError> {
        fs::create_dir_all(dir)?;
        let meta = format!(
            "# base_year={}\toutcome_year={}\tcatalog={}\n",
            self.base_year,
            self.outcome_year,
            catalog.version()
        );

        let mut values = meta.clone();
        values.push_str("zone\tstate");
        for name in catalog.names() {
            values.push('\t');
            values.push_str(name);
        }
        for o in Outcome::ALL {
            values.push('\t');
            values.push_str(o.column());
        }
        values.push('\n');

        let mut mask = meta.clone();
        mask.push_str("zone\tstate");
        for name in catalog.names() {
            mask.push('\t');
            mask.push_str(name);
        }
        mask.push('\n');

        let mut aux = meta;
        aux.push_str("zone\tstate");
        for name in AUX_COLUMNS {
            aux.push('\t');
            aux.push_str(name);
        }
        aux.push('\n');

        for (r, zone) in self.zones.iter().enumerate() {
            let lead = format!("{}\t{}", zone.code, zone.state);
            values.push_str(&lead);
            mask.push_str(&lead);
            aux.push_str(&lead);
            for (v, m) in self.values[r].iter().zip(&self.mask[r]) {
                values.push_str(&format!("\t{v}"));
                mask.push_str(if *m { "\t1" } else { "\t0" });
            }
            for v in self.outcomes[r] {
                values.push_str(&format!("\t{v}"));
            }
            for v in &self.aux[r] {
                match v {
                    Some(v) => aux.push_str(&format!("\t{v}")),
                    None => aux.push_str("\tNA"),
                }
            }
            values.push('\n');
            mask.push('\n');
            aux.push('\n');
        }

        for (name, body) in [(MATRIX_FILE, values), (MASK_FILE, mask), (AUX_FILE, aux)] {
            let mut f = fs::File::create(dir.join(name))?;
            f.write_all(body.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_dir(dir: &Path, catalog: &FeatureCatalog) -> Result<FeatureMatrix, ModelError> {
        let values_txt = fs::read_to_string(dir.join(MATRIX_FILE))?;
        let mask_txt = fs::read_to_string(dir.join(MASK_FILE))?;
        let aux_txt = fs::read_to_string(dir.join(AUX_FILE))?;

        let (base_year, outcome_year, values_rows) = split_table(&values_txt, MATRIX_FILE)?;
        let (_, _, mask_rows) = split_table(&mask_txt, MASK_FILE)?;
        let (_, _, aux_rows) = split_table(&aux_txt, AUX_FILE)?;

        let p = catalog.len();
        check_header(
            &values_rows[0],
            catalog.names().into_iter().chain(Outcome::ALL.map(Outcome::column)),
            MATRIX_FILE,
        )?;
        check_header(&mask_rows[0], catalog.names().into_iter(), MASK_FILE)?;
        check_header(&aux_rows[0], AUX_COLUMNS.into_iter(), AUX_FILE)?;
        let body = &values_rows[1..];
        if mask_rows.len() != values_rows.len() || aux_rows.len() != values_rows.len() {
            return Err(ModelError::Format(format!("{MASK_FILE}/{AUX_FILE} row count differs from {MATRIX_FILE}")));
        }

        let mut m = FeatureMatrix {
            zones: Vec::with_capacity(body.len()),
            values: Vec::with_capacity(body.len()),
            mask: Vec::with_capacity(body.len()),
            outcomes: Vec::with_capacity(body.len()),
            aux: Vec::with_capacity(body.len()),
            base_year,
            outcome_year,
        };
        for (i, row) in body.iter().enumerate() {
            let line = i + 3;
            if row.len() != 2 + p + 2 {
                return Err(ModelError::Format(format!("{MATRIX_FILE} line {line}: expected {} fields", 4 + p)));
            }
            let zone = ZoneId::new(ZoneCode::new(row[0])?, StateCode::new(row[1])?);
            let nums = row[2..]
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| ModelError::Format(format!("{MATRIX_FILE} line {line}: bad number `{s}`")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let mrow = &mask_rows[i + 1];
            let arow = &aux_rows[i + 1];
            if mrow.len() != 2 + p || mrow[0] != row[0] || arow.len() != 2 + AUX_COLUMNS.len() || arow[0] != row[0] {
                return Err(ModelError::Format(format!("sidecar line {line} does not match zone {}", row[0])));
            }
            let mask = mrow[2..]
                .iter()
                .map(|s| match *s {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(ModelError::Format(format!("{MASK_FILE} line {line}: bad flag `{other}`"))),
                })
                .collect::<Result<Vec<bool>, _>>()?;
            let aux = arow[2..]
                .iter()
                .map(|s| match *s {
                    "NA" => Ok(None),
                    s => s
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| ModelError::Format(format!("{AUX_FILE} line {line}: bad number `{s}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            m.zones.push(zone);
            m.values.push(nums[..p].to_vec());
            m.outcomes.push([nums[p], nums[p + 1]]);
            m.mask.push(mask);
            m.aux.push(aux);
        }
        Ok(m)
    }
}

fn split_table<'a>(txt: &'a str, name: &str) -> Result<(i32, i32, Vec<Vec<&'a str>>), ModelError> {
    let mut lines = txt.lines();
    let meta = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| ModelError::Format(format!("{name}: missing metadata line")))?;
    let mut base = None;
    let mut outcome = None;
    for kv in meta.split('\t') {
        match kv.split_once('=') {
            Some(("base_year", v)) => base = v.parse().ok(),
            Some(("outcome_year", v)) => outcome = v.parse().ok(),
            Some(("catalog", v)) if v != CATALOG_VERSION => {
                return Err(ModelError::Format(format!("{name}: catalog `{v}` is not {CATALOG_VERSION}")));
            }
            _ => {}
        }
    }
    let (Some(base), Some(outcome)) = (base, outcome) else {
        return Err(ModelError::Format(format!("{name}: metadata lacks years")));
    };
    let rows: Vec<Vec<&str>> = lines.filter(|l| !l.is_empty()).map(|l| l.split('\t').collect()).collect();
    if rows.is_empty() {
        return Err(ModelError::Format(format!("{name}: missing header")));
    }
    Ok((base, outcome, rows))
}

fn check_header<'a>(header: &[&str], expected: impl Iterator<Item = &'a str>, name: &str) -> Result<(), ModelError> {
    let want: Vec<&str> = ["zone", "state"].into_iter().chain(expected).collect();
    if header != want.as_slice() {
        return Err(ModelError::Format(format!("{name}: unexpected header")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    PercentageOutOfRange,
    NegativeRate,
    NonFinite,
    MaskedNotZero,
    NegativeOutcome,
    Shape,
    LagMismatch { expected: i32, found: i32 },
}

/// One failed invariant. `zone`/`column` are absent for matrix-level rules.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub zone: Option<ZoneId>,
    pub column: Option<String>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zone = self.zone.map_or_else(|| "-".to_string(), |z| z.to_string());
        let col = self.column.as_deref().unwrap_or("-");
        write!(f, "{zone}\t{col}\t{:?}", self.rule)
    }
}

/// Checks every matrix invariant; an empty list means the matrix is valid.
pub fn validate_matrix(m: &FeatureMatrix, catalog: &FeatureCatalog, expected_lag: i32) -> Vec<Violation> {
    let mut out = Vec::new();
    if m.lag() != expected_lag {
        out.push(Violation {
            zone: None,
            column: None,
            rule: Rule::LagMismatch { expected: expected_lag, found: m.lag() },
        });
    }
    let n = m.n_zones();
    if m.values.len() != n || m.mask.len() != n || m.outcomes.len() != n || m.aux.len() != n {
        out.push(Violation { zone: None, column: None, rule: Rule::Shape });
        return out;
    }
    for (r, zone) in m.zones.iter().enumerate() {
        if m.values[r].len() != catalog.len() || m.mask[r].len() != catalog.len() {
            out.push(Violation { zone: Some(*zone), column: None, rule: Rule::Shape });
            continue;
        }
        for (c, spec) in catalog.entries().iter().enumerate() {
            let v = m.values[r][c];
            let cell = |rule| Violation { zone: Some(*zone), column: Some(spec.name.to_string()), rule };
            if !v.is_finite() {
                out.push(cell(Rule::NonFinite));
                continue;
            }
            if m.mask[r][c] {
                if v != 0.0 {
                    out.push(cell(Rule::MaskedNotZero));
                }
                continue;
            }
            match spec.kind {
                FeatureKind::Percentage if !(0.0..=1.0).contains(&v) => out.push(cell(Rule::PercentageOutOfRange)),
                FeatureKind::PerThousand if v < 0.0 => out.push(cell(Rule::NegativeRate)),
                _ => {}
            }
        }
        for o in Outcome::ALL {
            let v = m.outcomes[r][o.index()];
            let cell = |rule| Violation { zone: Some(*zone), column: Some(o.column().to_string()), rule };
            if !v.is_finite() {
                out.push(cell(Rule::NonFinite));
            } else if v < 0.0 {
                out.push(cell(Rule::NegativeOutcome));
            }
        }
    }
    out
}
