use crate::model::{FeatureCatalog, FeatureMatrix, ImportanceReport, Outcome, Scope};
use crate::num::Scalar;

use super::forest::{fit_forest, mdi_importance, ForestParams, Importance};
use super::rng::derive_seed;
use super::{Dataset, MlError};

#[derive(Debug, Clone, PartialEq)]
pub struct SeedRuns<T> {
    pub seeds: Vec<u64>,
    pub runs: Vec<Importance<T>>,
    pub trees_per_seed: Vec<usize>,
    /// Element-wise arithmetic mean of the per-seed vectors.
    pub mean: Vec<T>,
}

/// Trains one forest per derived seed and averages the normalized MDI
/// vectors. Seed `i` is `derive_seed(master_seed, i)`.
pub fn seed_averaged<T: Scalar>(
    data: &Dataset<T>,
    params: &ForestParams,
    master_seed: u64,
) -> Result<SeedRuns<T>, MlError> {
    if data.n_rows() < 2 {
        return Err(MlError::TooFewRows { needed: 2, found: data.n_rows() });
    }
    params.validate(data.n_features())?;
    let p = data.n_features();
    let mut out =
        SeedRuns { seeds: Vec::new(), runs: Vec::new(), trees_per_seed: Vec::new(), mean: vec![T::zero(); p] };
    for i in 0..params.n_seeds {
        let seed = derive_seed(master_seed, i as u64);
        let forest = fit_forest(data, params, seed)?;
        out.trees_per_seed.push(forest.trees.len());
        out.seeds.push(seed);
        out.runs.push(mdi_importance(&forest, p));
    }
    for run in &out.runs {
        for (m, v) in out.mean.iter_mut().zip(&run.values) {
            *m += *v;
        }
    }
    let k = T::from_count(out.runs.len());
    for m in out.mean.iter_mut() {
        *m /= k;
    }
    Ok(out)
}

/// Training rows for `outcome` within `scope`: zones with every predictor
/// present.
pub fn training_data(m: &FeatureMatrix, outcome: Outcome, scope: &Scope) -> Dataset<f64> {
    let sub = m.subset(&scope.states);
    let rows: Vec<usize> = (0..sub.n_zones()).filter(|&r| sub.row_complete(r)).collect();
    let x: Vec<Vec<f64>> = rows.iter().map(|&r| sub.values[r].clone()).collect();
    let y: Vec<f64> = rows.iter().map(|&r| sub.outcomes[r][outcome.index()]).collect();
    if x.is_empty() {
        return Dataset::from_columns(vec![Vec::new(); m.n_features()], Vec::new()).expect("empty columns");
    }
    Dataset::from_rows(&x, y).expect("matrix rows are rectangular")
}

/// Runs the seed-averaged protocol on one outcome and scope of a matrix.
pub fn seed_averaged_importance(
    m: &FeatureMatrix,
    catalog: &FeatureCatalog,
    outcome: Outcome,
    scope: &Scope,
    params: &ForestParams,
    master_seed: u64,
) -> Result<ImportanceReport, MlError> {
    let data = training_data(m, outcome, scope);
    let runs = seed_averaged(&data, params, master_seed)?;
    Ok(ImportanceReport {
        outcome,
        scope: scope.clone(),
        features: catalog.names().into_iter().map(String::from).collect(),
        mean: runs.mean,
        per_seed: runs.runs.iter().map(|r| r.values.clone()).collect(),
        degenerate: runs.runs.iter().map(|r| r.degenerate).collect(),
        seeds: runs.seeds,
        trees_per_seed: runs.trees_per_seed,
        n_rows: data.n_rows(),
        params: *params,
        master_seed,
    })
}
