use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::num::Scalar;

use super::tree::{fit_tree, Tree, TreeNode, TreeParams};
use super::{Dataset, MlError};

/// Forest and protocol settings. Defaults: 1000 trees, `ceil(p/3)`
/// candidate features per node, fully grown bootstrapped trees, 8 seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` resolves to `ceil(p / 3)`.
    pub mtry: Option<usize>,
    pub min_samples_split: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
    pub n_seeds: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 1000, mtry: None, min_samples_split: 2, max_depth: None, bootstrap: true, n_seeds: 8 }
    }
}

impl ForestParams {
    pub fn resolved_mtry(&self, p: usize) -> usize {
        self.mtry.unwrap_or_else(|| p.div_ceil(3).max(1))
    }

    pub fn validate(&self, p: usize) -> Result<(), MlError> {
        let mtry = self.resolved_mtry(p);
        if self.n_trees == 0 {
            return Err(MlError::InvalidParams("n_trees must be at least 1".into()));
        }
        if self.n_seeds == 0 {
            return Err(MlError::InvalidParams("n_seeds must be at least 1".into()));
        }
        if mtry == 0 || mtry > p {
            return Err(MlError::InvalidParams(format!("mtry {mtry} outside [1, {p}]")));
        }
        Ok(())
    }

    pub fn tree_params(&self, p: usize) -> TreeParams {
        TreeParams {
            mtry: self.resolved_mtry(p),
            min_samples_split: self.min_samples_split,
            max_depth: self.max_depth,
            bootstrap: self.bootstrap,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel<T> {
    pub trees: Vec<Tree<T>>,
    pub params: ForestParams,
    pub seed: u64,
    pub n_features: usize,
}

/// Trains `params.n_trees` trees on the current rayon pool. Tree `t` only
/// reads the `(seed, t)` streams, so the result is independent of the
/// worker count.
pub fn fit_forest<T: Scalar>(data: &Dataset<T>, params: &ForestParams, seed: u64) -> Result<ForestModel<T>, MlError> {
    let p = data.n_features();
    params.validate(p)?;
    if data.n_rows() == 0 {
        return Err(MlError::TooFewRows { needed: 1, found: 0 });
    }
    let tp = params.tree_params(p);
    let trees =
        (0..params.n_trees).into_par_iter().map(|t| fit_tree(data, &tp, seed, t)).collect::<Result<Vec<_>, _>>()?;
    Ok(ForestModel { trees, params: *params, seed, n_features: p })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Importance<T> {
    pub values: Vec<T>,
    /// No split anywhere in the forest reduced impurity.
    pub degenerate: bool,
}

/// Normalized mean decrease in impurity.
///
/// Per feature: the sum over every split node of every tree of
/// `(n_node / n_root) * decrease`, divided by the tree count, then scaled
/// so the vector sums to one.
pub fn mdi_importance<T: Scalar>(forest: &ForestModel<T>, p: usize) -> Importance<T> {
    let mut acc = vec![T::zero(); p];
    for tree in &forest.trees {
        let n_root = tree.root().n_samples();
        for node in &tree.nodes {
            if let TreeNode::Split { feature, .. } = node {
                acc[*feature] += node.weighted_decrease(n_root);
            }
        }
    }
    let n_trees = T::from_count(forest.trees.len().max(1));
    let mut total = T::zero();
    for v in acc.iter_mut() {
        *v /= n_trees;
        total += *v;
    }
    if total <= T::zero() {
        return Importance { values: vec![T::zero(); p], degenerate: true };
    }
    Importance { values: acc.into_iter().map(|v| v / total).collect(), degenerate: false }
}

/// Mean of the per-tree leaf predictions.
pub fn predict<T: Scalar>(forest: &ForestModel<T>, row: &[T]) -> Result<T, MlError> {
    if row.len() != forest.n_features {
        return Err(MlError::DimensionMismatch { expected: forest.n_features, found: row.len() });
    }
    let mut sum = T::zero();
    for tree in &forest.trees {
        sum += tree.predict(row);
    }
    Ok(sum / T::from_count(forest.trees.len()))
}

/// Line-oriented audit dump of every node.
pub fn dump_forest<T: Scalar>(forest: &ForestModel<T>, feature_names: &[&str]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# forest seed={} trees={} features={} mtry={} bootstrap={}",
        forest.seed,
        forest.trees.len(),
        forest.n_features,
        forest.params.resolved_mtry(forest.n_features),
        forest.params.bootstrap
    );
    for (t, tree) in forest.trees.iter().enumerate() {
        let _ = writeln!(out, "tree {t} nodes={} in_bag={}", tree.nodes.len(), tree.in_bag.len());
        for (i, node) in tree.nodes.iter().enumerate() {
            match node {
                TreeNode::Leaf { prediction, n_samples } => {
                    let _ = writeln!(out, "  {i} leaf n={n_samples} value={prediction}");
                }
                TreeNode::Split { feature, threshold, decrease, n_samples, left, right } => {
                    let name = feature_names.get(*feature).copied().unwrap_or("?");
                    let _ = writeln!(
                        out,
                        "  {i} split n={n_samples} feature={feature}:{name} threshold={threshold} decrease={decrease} left={left} right={right}"
                    );
                }
            }
        }
    }
    out
}
