use serde::{Deserialize, Serialize};

use crate::model::{FeatureCatalog, FeatureGroup, FeatureMatrix, Scope};

/// Median, mean and sample standard deviation of one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableStats {
    pub name: String,
    pub label: String,
    pub group: FeatureGroup,
    /// Unmasked cells the statistics were taken over.
    pub n: usize,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    /// `n − 1` denominator; `None` below two values.
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopeSummary {
    pub scope: Scope,
    pub base_year: i32,
    pub n_zones: usize,
    /// Catalog order.
    pub rows: Vec<VariableStats>,
}

/// Median of a sorted, non-empty slice.
fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Statistics of `values`, in the order given (the sums are order
/// sensitive in the last bit).
pub fn column_stats(values: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd =
        (values.len() > 1).then(|| (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    (Some(median(&sorted)), Some(mean), sd)
}

/// Per-variable statistics over the scope's zones, skipping masked cells.
pub fn summarize(m: &FeatureMatrix, catalog: &FeatureCatalog, scope: &Scope) -> ScopeSummary {
    let sub = m.subset(&scope.states);
    let rows = catalog
        .entries()
        .iter()
        .enumerate()
        .map(|(c, spec)| {
            let values: Vec<f64> = sub.column(c).into_iter().flatten().collect();
            let (median, mean, sd) = column_stats(&values);
            VariableStats {
                name: spec.name.to_string(),
                label: spec.label.to_string(),
                group: spec.group,
                n: values.len(),
                median,
                mean,
                sd,
            }
        })
        .collect();
    ScopeSummary { scope: scope.clone(), base_year: m.base_year, n_zones: sub.n_zones(), rows }
}
