use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::catalog::Outcome;
use super::zone::StateCode;
use crate::mlcore::ForestParams;

/// A set of states analysed together: one state alone, or the pooled set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    /// File-name friendly id: the state code, or `pooled`.
    pub id: String,
    /// Column label, e.g. `NY & MA`.
    pub label: String,
    pub states: Vec<StateCode>,
}

impl Scope {
    pub fn single(state: StateCode) -> Self {
        Self { id: state.to_string(), label: state.to_string(), states: vec![state] }
    }

    pub fn pooled(states: &[StateCode]) -> Self {
        let label = states.iter().map(StateCode::to_string).collect::<Vec<_>>().join(" & ");
        Self { id: "pooled".into(), label, states: states.to_vec() }
    }

    /// Pooled first, then each state in configured order.
    pub fn standard_set(states: &[StateCode]) -> Vec<Scope> {
        let mut out = vec![Scope::pooled(states)];
        out.extend(states.iter().copied().map(Scope::single));
        out
    }
}

/// Seed-averaged, normalized MDI ranking for one outcome and scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub outcome: Outcome,
    pub scope: Scope,
    pub features: Vec<String>,
    /// Arithmetic mean of `per_seed`, in feature order.
    pub mean: Vec<f64>,
    pub per_seed: Vec<Vec<f64>>,
    pub seeds: Vec<u64>,
    /// Set for a seed whose forest had zero total impurity decrease.
    pub degenerate: Vec<bool>,
    pub trees_per_seed: Vec<usize>,
    pub n_rows: usize,
    pub params: ForestParams,
    pub master_seed: u64,
}

impl ImportanceReport {
    pub fn feature_importances(&self) -> BTreeMap<&str, f64> {
        self.features.iter().map(String::as_str).zip(self.mean.iter().copied()).collect()
    }

    /// Feature indices by descending mean importance; ties keep catalog order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.mean.len()).collect();
        idx.sort_by(|&a, &b| self.mean[b].total_cmp(&self.mean[a]).then(a.cmp(&b)));
        idx
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate.iter().all(|&d| d)
    }

    /// Canonical JSON; byte-identical for identical inputs.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
