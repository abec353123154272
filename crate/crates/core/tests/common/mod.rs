//! Independent reference implementations used by the integration tests.
//!
//! None of these call into the code they check. They favour obviousness
//! over speed: exhaustive enumeration, exact arithmetic, and different
//! formulas from the production code where a choice exists.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lid_core::mlcore::{ForestModel, TreeNode};
use lid_core::Rational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pipeline")
}

// ------------------------------------------------------------------ splits

/// Population variance as E[y²] − E[y]², exact.
pub fn variance(ys: &[Rational]) -> Rational {
    if ys.is_empty() {
        return Rational::zero();
    }
    let n = Rational::from_integer(ys.len() as i128);
    let s: Rational = ys.iter().copied().fold(Rational::zero(), |a, b| a + b);
    let s2: Rational = ys.iter().fold(Rational::zero(), |a, &b| a + b * b);
    s2 / n - (s / n) * (s / n)
}

/// Weighted variance decrease of partitioning `samples` at `x <= t`.
pub fn decrease_at(xs: &[Rational], ys: &[Rational], samples: &[usize], t: Rational) -> Rational {
    let all: Vec<Rational> = samples.iter().map(|&s| ys[s]).collect();
    let left: Vec<Rational> = samples.iter().filter(|&&s| xs[s] <= t).map(|&s| ys[s]).collect();
    let right: Vec<Rational> = samples.iter().filter(|&&s| xs[s] > t).map(|&s| ys[s]).collect();
    let n = Rational::from_integer(all.len() as i128);
    let nl = Rational::from_integer(left.len() as i128);
    let nr = Rational::from_integer(right.len() as i128);
    variance(&all) - nl / n * variance(&left) - nr / n * variance(&right)
}

/// Exhaustive best split: every candidate feature in ascending order, every
/// midpoint between adjacent distinct values in ascending order, first
/// strict maximum wins. `None` unless the best decrease is positive.
pub fn brute_best_split(
    cols: &[Vec<Rational>],
    ys: &[Rational],
    samples: &[usize],
    candidates: &[usize],
) -> Option<(usize, Rational, Rational)> {
    let mut best: Option<(usize, Rational, Rational)> = None;
    for &f in candidates {
        let mut vals: Vec<Rational> = samples.iter().map(|&s| cols[f][s]).collect();
        vals.sort();
        vals.dedup();
        for w in vals.windows(2) {
            let t = (w[0] + w[1]) / q(2);
            let d = decrease_at(&cols[f], ys, samples, t);
            if best.as_ref().is_none_or(|b| d > b.2) {
                best = Some((f, t, d));
            }
        }
    }
    best.filter(|b| b.2 > Rational::zero())
}

/// A small random dataset with integer features and targets.
pub struct SmallData {
    pub cols: Vec<Vec<i64>>,
    pub y: Vec<i64>,
}

impl SmallData {
    pub fn random(rng: &mut ChaCha8Rng, max_n: usize, max_p: usize) -> Self {
        let n = rng.gen_range(2..=max_n);
        let p = rng.gen_range(1..=max_p);
        // narrow value ranges force ties between features and thresholds
        let span = rng.gen_range(1..=4);
        let cols = (0..p).map(|_| (0..n).map(|_| rng.gen_range(0..=span)).collect()).collect();
        let y = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
        Self { cols, y }
    }

    pub fn rational_cols(&self) -> Vec<Vec<Rational>> {
        self.cols.iter().map(|c| c.iter().map(|&v| q(v)).collect()).collect()
    }

    pub fn rational_y(&self) -> Vec<Rational> {
        self.y.iter().map(|&v| q(v)).collect()
    }

    pub fn f64_cols(&self) -> Vec<Vec<f64>> {
        self.cols.iter().map(|c| c.iter().map(|&v| v as f64).collect()).collect()
    }

    pub fn f64_y(&self) -> Vec<f64> {
        self.y.iter().map(|&v| v as f64).collect()
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// --------------------------------------------------------------------- MDI

/// Node-walking MDI: route each tree's in-bag multiset from the root,
/// recompute every split's decrease from the samples that reach it, weight
/// by the share of root samples, average over trees, normalize. Exact.
pub fn oracle_mdi<T: Copy>(
    forest: &ForestModel<T>,
    cols: &[Vec<Rational>],
    ys: &[Rational],
    to_q: impl Fn(T) -> Rational,
) -> Option<Vec<Rational>> {
    let p = cols.len();
    let mut acc = vec![Rational::zero(); p];
    for tree in &forest.trees {
        let n_root = Rational::from_integer(tree.in_bag.len() as i128);
        let mut stack = vec![(0usize, tree.in_bag.clone())];
        while let Some((i, samples)) = stack.pop() {
            if let TreeNode::Split { feature, threshold, left, right, .. } = &tree.nodes[i] {
                let t = to_q(*threshold);
                let d = decrease_at(&cols[*feature], ys, &samples, t);
                acc[*feature] += Rational::from_integer(samples.len() as i128) / n_root * d;
                let (l, r): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&s| cols[*feature][s] <= t);
                stack.push((*left, l));
                stack.push((*right, r));
            }
        }
    }
    let k = Rational::from_integer(forest.trees.len() as i128);
    let acc: Vec<Rational> = acc.into_iter().map(|a| a / k).collect();
    let total = acc.iter().fold(Rational::zero(), |a, &b| a + b);
    if total.is_zero() {
        return None;
    }
    Some(acc.into_iter().map(|a| a / total).collect())
}

/// Exact rational for an f64 threshold (all test thresholds are dyadic).
pub fn f64_to_q(x: f64) -> Rational {
    let r = num_rational::Ratio::<i128>::approximate_float(x).expect("finite");
    assert_eq!(r.to_f64().unwrap(), x, "threshold {x} is not a small dyadic");
    r
}

pub fn q_to_f64(x: Rational) -> f64 {
    x.to_f64().unwrap()
}

// ----------------------------------------------------------------- spatial

/// Point on a grid of 1/1024 degree; all arithmetic below is exact in i128.
pub type GridPt = [i64; 2];

pub const GRID: f64 = 1024.0;

pub fn to_deg(p: GridPt) -> [f64; 2] {
    [p[0] as f64 / GRID, p[1] as f64 / GRID]
}

fn on_segment(p: GridPt, a: GridPt, b: GridPt) -> bool {
    let cross = (b[0] - a[0]) as i128 * (p[1] - a[1]) as i128 - (b[1] - a[1]) as i128 * (p[0] - a[0]) as i128;
    cross == 0 && p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Winding number of a closed ring around `p` (p not on the ring).
fn winding(p: GridPt, ring: &[GridPt]) -> i32 {
    let mut w = 0;
    for e in ring.windows(2) {
        let (a, b) = (e[0], e[1]);
        let side = (b[0] - a[0]) as i128 * (p[1] - a[1]) as i128 - (b[1] - a[1]) as i128 * (p[0] - a[0]) as i128;
        if a[1] <= p[1] {
            if b[1] > p[1] && side > 0 {
                w += 1;
            }
        } else if b[1] <= p[1] && side < 0 {
            w -= 1;
        }
    }
    w
}

/// Exterior ring plus holes; the boundary of any ring counts as inside.
pub fn brute_contains(rings: &[Vec<GridPt>], p: GridPt) -> bool {
    if rings.iter().any(|r| r.windows(2).any(|e| on_segment(p, e[0], e[1]))) {
        return true;
    }
    winding(p, &rings[0]) != 0 && rings[1..].iter().all(|h| winding(p, h) == 0)
}

/// Simple star-shaped polygon on the grid around `centre`.
pub fn star_ring(rng: &mut ChaCha8Rng, centre: GridPt, r_min: i64, r_max: i64) -> Vec<GridPt> {
    let k = rng.gen_range(3..=9);
    let slot = std::f64::consts::TAU / k as f64;
    let mut ring: Vec<GridPt> = (0..k)
        .map(|i| {
            let a = slot * (i as f64 + rng.gen_range(0.15..0.85));
            let r = rng.gen_range(r_min..=r_max) as f64;
            [centre[0] + (r * a.cos()).round() as i64, centre[1] + (r * a.sin()).round() as i64]
        })
        .collect();
    ring.push(ring[0]);
    ring
}

pub fn rect_ring(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<GridPt> {
    vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]
}

// -------------------------------------------------------------------- TSV

/// Reads a TSV, skipping `#` comment lines.
pub fn read_tsv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines =
        text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split('\t').map(String::from).collect::<Vec<_>>());
    let header = lines.next().unwrap_or_default();
    (header, lines.collect())
}

// ---------------------------------------------------------------- GeoJSON

/// Structural RFC 7946 checks for a FeatureCollection of (Multi)Polygons.
/// Returns every problem found.
pub fn rfc7946_problems(doc: &serde_json::Value) -> Vec<String> {
    use serde_json::Value;
    let mut bad = Vec::new();
    if doc.get("type") != Some(&Value::from("FeatureCollection")) {
        bad.push("top-level type is not FeatureCollection".into());
    }
    if doc.get("crs").is_some() {
        bad.push("crs member is not allowed".into());
    }
    let Some(features) = doc.get("features").and_then(Value::as_array) else {
        bad.push("features is not an array".into());
        return bad;
    };
    for (i, f) in features.iter().enumerate() {
        if f.get("type") != Some(&Value::from("Feature")) {
            bad.push(format!("feature {i}: type is not Feature"));
        }
        match f.get("properties") {
            Some(Value::Object(_)) | Some(Value::Null) => {}
            _ => bad.push(format!("feature {i}: properties must be an object or null")),
        }
        let Some(g) = f.get("geometry") else {
            bad.push(format!("feature {i}: geometry missing"));
            continue;
        };
        if g.is_null() {
            continue;
        }
        let coords = g.get("coordinates");
        let polygons: Vec<&Value> = match (g.get("type").and_then(Value::as_str), coords) {
            (Some("Polygon"), Some(c)) => vec![c],
            (Some("MultiPolygon"), Some(Value::Array(ps))) => ps.iter().collect(),
            other => {
                bad.push(format!("feature {i}: unsupported geometry {other:?}"));
                continue;
            }
        };
        for poly in polygons {
            let Some(rings) = poly.as_array().filter(|r| !r.is_empty()) else {
                bad.push(format!("feature {i}: polygon without rings"));
                continue;
            };
            for (k, ring) in rings.iter().enumerate() {
                let pts: Option<Vec<[f64; 2]>> = ring.as_array().map(|r| {
                    r.iter()
                        .filter_map(|p| {
                            let a = p.as_array()?;
                            if a.len() < 2 || a.len() > 3 {
                                return None;
                            }
                            Some([a[0].as_f64()?, a[1].as_f64()?])
                        })
                        .collect()
                });
                let Some(pts) = pts.filter(|v| Some(v.len()) == ring.as_array().map(Vec::len)) else {
                    bad.push(format!("feature {i}: ring {k} has malformed positions"));
                    continue;
                };
                if pts.len() < 4 {
                    bad.push(format!("feature {i}: ring {k} has fewer than 4 positions"));
                    continue;
                }
                if pts.first() != pts.last() {
                    bad.push(format!("feature {i}: ring {k} is not closed"));
                }
                if pts.iter().any(|p| !(-180.0..=180.0).contains(&p[0]) || !(-90.0..=90.0).contains(&p[1])) {
                    bad.push(format!("feature {i}: ring {k} leaves lon/lat range"));
                }
                let twice_area: f64 = pts.windows(2).map(|e| e[0][0] * e[1][1] - e[1][0] * e[0][1]).sum();
                let ccw = twice_area > 0.0;
                if (k == 0) != ccw {
                    bad.push(format!("feature {i}: ring {k} has the wrong winding"));
                }
            }
        }
    }
    bad
}

// ---------------------------------------------------------------- fixture

/// Runs the shipped fixture through `stages` into `out` on a pool of
/// `threads` workers.
pub fn run_fixture(out: &Path, threads: usize, stages: &[lid_core::pipeline::Stage]) {
    use lid_core::config::RunConfig;
    use lid_core::pipeline::{OutcomeSelection, Pipeline};
    let config = RunConfig::load(&fixture_dir().join("config.toml")).expect("fixture config loads");
    let pipeline = Pipeline::new(config, out.to_path_buf(), OutcomeSelection::Both).expect("fixture validates");
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| pipeline.run(stages)).expect("fixture run succeeds");
}

/// Golden value cell: `NA` or a float written with round-trip precision.
pub fn golden_cell(s: &str) -> Option<f64> {
    (s != "NA").then(|| s.parse().unwrap_or_else(|_| panic!("bad golden cell {s}")))
}

// ------------------------------------------------------------ zone layout

use lid_core::model::{StateCode, ZoneCode, ZonePolygon};
use lid_core::spatial::ZoneIndex;
use lid_core::ZoneId;

pub struct Layout {
    pub zones: Vec<(ZoneId, Vec<Vec<GridPt>>)>,
}

pub fn zone(code: u32) -> ZoneId {
    ZoneId::new(ZoneCode::new(&format!("{code:05}")).unwrap(), StateCode::new("NY").unwrap())
}

/// Overlapping stars, a row of edge-sharing rectangles, and a rectangle
/// with a hole that another zone fills exactly.
pub fn layout(seed: u64) -> Layout {
    let mut rng = seeded(seed);
    let mut zones = Vec::new();
    for i in 0..25 {
        let c = [rng.gen_range(-600..600), rng.gen_range(-600..600)];
        zones.push((zone(10100 + i), vec![star_ring(&mut rng, c, 40, 260)]));
    }
    for i in 0..6 {
        let x0 = -700 + 100 * i as i64;
        zones.push((zone(10050 - i), vec![rect_ring(x0, 650, x0 + 100, 750)]));
    }
    zones.push((zone(10300), vec![rect_ring(300, -750, 500, -650), rect_ring(350, -720, 450, -680)]));
    zones.push((zone(10299), vec![rect_ring(350, -720, 450, -680)]));
    Layout { zones }
}

pub fn index(l: &Layout) -> ZoneIndex {
    let polys = l
        .zones
        .iter()
        .map(|(z, rings)| {
            let rings = rings.iter().map(|r| r.iter().map(|&p| to_deg(p)).collect()).collect();
            ZonePolygon::new(*z, rings, 1.0).unwrap()
        })
        .collect();
    ZoneIndex::new(polys)
}

pub fn brute_assign(l: &Layout, p: GridPt) -> Option<ZoneId> {
    l.zones.iter().filter(|(_, rings)| brute_contains(rings, p)).map(|(z, _)| *z).min()
}

/// Random interior points, plus every vertex and edge midpoint, which land
/// on boundaries.
pub fn probe_points(l: &Layout, seed: u64, n: usize) -> Vec<GridPt> {
    let mut rng = seeded(seed);
    let mut pts: Vec<GridPt> = (0..n).map(|_| [rng.gen_range(-900..900), rng.gen_range(-900..900)]).collect();
    for (_, rings) in &l.zones {
        for r in rings {
            for e in r.windows(2) {
                pts.push(e[0]);
                if (e[0][0] + e[1][0]) % 2 == 0 && (e[0][1] + e[1][1]) % 2 == 0 {
                    pts.push([(e[0][0] + e[1][0]) / 2, (e[0][1] + e[1][1]) / 2]);
                }
            }
        }
    }
    pts
}

// ----------------------------------------------------------- matrix cells

/// Every cell of a matrix keyed by (zone code, column name); `None` for
/// masked or missing cells.
pub fn matrix_cells(m: &lid_core::FeatureMatrix) -> std::collections::BTreeMap<(String, String), Option<f64>> {
    let catalog = lid_core::catalog_default();
    let mut out = std::collections::BTreeMap::new();
    for (r, z) in m.zones.iter().enumerate() {
        let code = z.code.to_string();
        for (c, name) in catalog.names().into_iter().enumerate() {
            out.insert((code.clone(), name.to_string()), m.get(r, c));
        }
        out.insert((code.clone(), "patents_per_1000".into()), Some(m.outcomes[r][0]));
        out.insert((code.clone(), "sfr".into()), Some(m.outcomes[r][1]));
        for (a, name) in lid_core::model::AUX_COLUMNS.iter().enumerate() {
            out.insert((code.clone(), name.to_string()), m.aux[r][a]);
        }
    }
    out
}

/// Compares a matrix with `golden/matrix.tsv` bit for bit. Returns the
/// number of cells checked or the first difference.
pub fn compare_with_golden_matrix(m: &lid_core::FeatureMatrix) -> Result<usize, String> {
    let got = matrix_cells(m);
    let (header, rows) = read_tsv(&fixture_dir().join("golden/matrix.tsv"));
    let order: Vec<String> = m.zones.iter().map(|z| z.code.to_string()).collect();
    let want_order: Vec<String> = rows.iter().map(|r| r[0].clone()).collect();
    if order != want_order {
        return Err(format!("zone order {order:?} != {want_order:?}"));
    }
    let mut checked = 0;
    for row in &rows {
        for (name, cell) in header.iter().zip(row).skip(2) {
            let want = golden_cell(cell);
            let have = got.get(&(row[0].clone(), name.clone())).ok_or_else(|| format!("{} {name} missing", row[0]))?;
            if have.map(f64::to_bits) != want.map(f64::to_bits) {
                return Err(format!("zone {} column {name}: {have:?} vs golden {want:?}", row[0]));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
