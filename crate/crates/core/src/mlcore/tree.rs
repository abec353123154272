use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::num::Scalar;

use super::rng::{bootstrap_stream, node_stream};
use super::split::best_split;
use super::{Dataset, MlError};

/// Arena node. Children are indices into [`Tree::nodes`]; the root is 0 and
/// nodes are stored in preorder.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode<T> {
    Leaf {
        prediction: T,
        n_samples: usize,
    },
    Split {
        feature: usize,
        threshold: T,
        /// Unweighted decrease at this node; see [`TreeNode::weighted_decrease`].
        decrease: T,
        n_samples: usize,
        left: usize,
        right: usize,
    },
}

impl<T: Scalar> TreeNode<T> {
    pub fn n_samples(&self) -> usize {
        match self {
            TreeNode::Leaf { n_samples, .. } | TreeNode::Split { n_samples, .. } => *n_samples,
        }
    }

    /// `(n_node / n_root) * decrease`; zero for leaves.
    pub fn weighted_decrease(&self, n_root: usize) -> T {
        match self {
            TreeNode::Leaf { .. } => T::zero(),
            TreeNode::Split { decrease, n_samples, .. } => {
                T::from_count(*n_samples) / T::from_count(n_root) * *decrease
            }
        }
    }
}

/// Per-tree growth settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub mtry: usize,
    pub min_samples_split: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree<T> {
    pub nodes: Vec<TreeNode<T>>,
    /// Row indices the tree was grown on (with repeats under bootstrap).
    pub in_bag: Vec<usize>,
}

impl<T: Scalar> Tree<T> {
    pub fn root(&self) -> &TreeNode<T> {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[TreeNode<T>], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn predict(&self, row: &[T]) -> T {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { prediction, .. } => return *prediction,
                TreeNode::Split { feature, threshold, left, right, .. } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Grows one tree from the `(seed, tree_index)` stream family.
pub fn fit_tree<T: Scalar>(
    data: &Dataset<T>,
    params: &TreeParams,
    seed: u64,
    tree_index: usize,
) -> Result<Tree<T>, MlError> {
    let n = data.n_rows();
    let p = data.n_features();
    if n == 0 {
        return Err(MlError::TooFewRows { needed: 1, found: 0 });
    }
    if params.mtry == 0 || params.mtry > p.max(1) {
        return Err(MlError::InvalidParams(format!("mtry {} outside [1, {p}]", params.mtry)));
    }

    let in_bag: Vec<usize> = if params.bootstrap {
        let mut rng = bootstrap_stream(seed, tree_index);
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    } else {
        (0..n).collect()
    };

    let mut grower = Grower { data, params, seed, tree_index, nodes: Vec::new() };
    grower.grow(in_bag.clone(), 0);
    Ok(Tree { nodes: grower.nodes, in_bag })
}

struct Grower<'a, T> {
    data: &'a Dataset<T>,
    params: &'a TreeParams,
    seed: u64,
    tree_index: usize,
    nodes: Vec<TreeNode<T>>,
}

impl<T: Scalar> Grower<'_, T> {
    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let n = samples.len();
        let y = self.data.target();
        let mut sum = T::zero();
        for &s in &samples {
            sum += y[s];
        }
        let leaf = TreeNode::Leaf { prediction: sum / T::from_count(n), n_samples: n };

        let pure = samples.iter().all(|&s| y[s] == y[samples[0]]);
        let capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || capped || n < self.params.min_samples_split.max(2) {
            self.nodes.push(leaf);
            return id;
        }

        let p = self.data.n_features();
        let mut candidates = if self.params.mtry >= p {
            (0..p).collect::<Vec<_>>()
        } else {
            let mut rng = node_stream(self.seed, self.tree_index, id);
            index::sample(&mut rng, p, self.params.mtry).into_vec()
        };
        candidates.sort_unstable();

        let Some(split) = best_split(self.data, &samples, &candidates) else {
            self.nodes.push(leaf);
            return id;
        };

        let col = self.data.column(split.feature);
        let (ls, rs): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&s| col[s] <= split.threshold);
        debug_assert!(!ls.is_empty() && !rs.is_empty());

        // reserve the slot so children land after the parent (preorder)
        self.nodes.push(leaf);
        let left = self.grow(ls, depth + 1);
        let right = self.grow(rs, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            decrease: split.decrease,
            n_samples: n,
            left,
            right,
        };
        id
    }
}
