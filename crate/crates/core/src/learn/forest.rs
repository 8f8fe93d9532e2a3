use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{check_training_data, LearnError, Matrix, ModelParams, TrainedModel};
use crate::math;
use crate::rng::{self, Rng};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    #[default]
    Sqrt,
    Log2,
    All,
}

/// Number of candidate features examined per split for `d` features.
pub fn candidate_count(d: usize, rule: MaxFeatures) -> usize {
    if d == 0 {
        return 0;
    }
    let k = match rule {
        MaxFeatures::Sqrt => math::ceil(math::sqrt(d as f64)) as usize,
        MaxFeatures::Log2 => math::ceil(math::log2(d as f64)) as usize,
        MaxFeatures::All => d,
    };
    k.clamp(1, d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub max_features: MaxFeatures,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_estimators: 100,
            max_features: MaxFeatures::Sqrt,
            max_depth: None,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.n_estimators == 0 {
            return Err(LearnError::InvalidConfig("random_forest.n_estimators must be at least 1"));
        }
        if self.max_depth == Some(0) {
            return Err(LearnError::InvalidConfig("random_forest.max_depth must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf { positive_fraction: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn positive_fraction(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { positive_fraction } => return positive_fraction,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn vote(&self, row: &[f64]) -> bool {
        self.positive_fraction(row) > 0.5
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], at: usize) -> usize {
            match nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub config: ForestConfig,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Fraction of trees voting controversial.
    pub fn score(&self, row: &[f64]) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        let votes = self.trees.iter().filter(|t| t.vote(row)).count();
        votes as f64 / self.trees.len() as f64
    }
}

pub fn tree_seed(master: u64, tree: usize) -> u64 {
    rng::derive(master, &[tree as u64])
}

/// `n` row indices drawn uniformly with replacement.
pub fn bootstrap_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut r = rng::rng_for(seed, &[0]);
    (0..n).map(|_| r.gen_range(0..n)).collect()
}

pub fn train_random_forest(x: &Matrix, y: &[bool], cfg: &ForestConfig, seed: u64) -> Result<TrainedModel, LearnError> {
    train_random_forest_with(x, y, cfg, seed, |n, fit| (0..n).map(fit).collect())
}

/// Like [`train_random_forest`], but `map` decides how the `n` per-tree fits
/// are scheduled. Each tree's randomness depends only on the master seed and
/// its index, so any schedule that keeps index order yields the same forest.
pub fn train_random_forest_with<M>(
    x: &Matrix,
    y: &[bool],
    cfg: &ForestConfig,
    seed: u64,
    map: M,
) -> Result<TrainedModel, LearnError>
where
    M: FnOnce(usize, &(dyn Fn(usize) -> Tree + Sync)) -> Vec<Tree>,
{
    cfg.validate()?;
    check_training_data(x, y)?;
    let k = candidate_count(x.cols(), cfg.max_features);
    let fit = |t: usize| {
        let s = tree_seed(seed, t);
        let sample = bootstrap_indices(x.rows(), s);
        let mut r = rng::rng_for(s, &[1]);
        fit_tree(x, y, &sample, k, cfg.max_depth, &mut r)
    };
    let trees = map(cfg.n_estimators, &fit);
    Ok(TrainedModel {
        feature_dim: x.cols(),
        seed,
        params: ModelParams::RandomForest(ForestModel {
            config: cfg.clone(),
            trees,
        }),
    })
}

struct Split {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

/// Best Gini split of `rows` on feature `j`, or `None` if `j` is constant there.
fn best_on_feature(x: &Matrix, y: &[bool], rows: &mut [usize], j: usize) -> Option<Split> {
    rows.sort_by(|&a, &b| x.get(a, j).total_cmp(&x.get(b, j)));
    let n = rows.len();
    let total_pos = rows.iter().filter(|&&i| y[i]).count();
    let mut left_pos = 0;
    let mut best: Option<Split> = None;
    for k in 0..n - 1 {
        if y[rows[k]] {
            left_pos += 1;
        }
        let (a, b) = (x.get(rows[k], j), x.get(rows[k + 1], j));
        if a == b {
            continue;
        }
        let nl = k + 1;
        let nr = n - nl;
        let imp = (nl as f64 * gini(left_pos, nl) + nr as f64 * gini(total_pos - left_pos, nr)) / n as f64;
        // Sweeping upward, strict improvement keeps the lowest threshold on ties.
        if best.as_ref().is_none_or(|s| imp < s.impurity) {
            best = Some(Split {
                impurity: imp,
                feature: j,
                threshold: a + (b - a) / 2.0,
            });
        }
    }
    best
}

/// Grow one CART tree on the (possibly repeated) rows `sample`.
///
/// Each split inspects features in a random order and evaluates the first
/// `k` that are not constant within the node, so a node only becomes a leaf
/// for lack of features when every feature is constant there.
pub fn fit_tree(x: &Matrix, y: &[bool], sample: &[usize], k: usize, max_depth: Option<usize>, r: &mut Rng) -> Tree {
    let mut nodes = Vec::new();
    // (node slot, rows, depth)
    let mut stack = alloc::vec![(0usize, sample.to_vec(), 0usize)];
    nodes.push(TreeNode::Leaf { positive_fraction: 0.0 });
    let mut order: Vec<usize> = (0..x.cols()).collect();

    while let Some((slot, mut rows, depth)) = stack.pop() {
        let n = rows.len();
        let pos = rows.iter().filter(|&&i| y[i]).count();
        let leaf = TreeNode::Leaf {
            positive_fraction: if n == 0 { 0.0 } else { pos as f64 / n as f64 },
        };
        if n < 2 || pos == 0 || pos == n || max_depth.is_some_and(|d| depth >= d) {
            nodes[slot] = leaf;
            continue;
        }

        order.shuffle(r);
        let mut best: Option<Split> = None;
        let mut evaluated = 0;
        for &j in &order {
            if evaluated == k {
                break;
            }
            let Some(s) = best_on_feature(x, y, &mut rows, j) else { continue };
            evaluated += 1;
            let better = match &best {
                None => true,
                Some(b) => (s.impurity, s.feature).partial_cmp(&(b.impurity, b.feature)) == Some(core::cmp::Ordering::Less),
            };
            if better {
                best = Some(s);
            }
        }
        let Some(split) = best else {
            nodes[slot] = leaf;
            continue;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&i| x.get(i, split.feature) <= split.threshold);
        let left = nodes.len();
        nodes.push(TreeNode::Leaf { positive_fraction: 0.0 });
        let right = nodes.len();
        nodes.push(TreeNode::Leaf { positive_fraction: 0.0 });
        nodes[slot] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        stack.push((right, right_rows, depth + 1));
        stack.push((left, left_rows, depth + 1));
    }
    Tree { nodes }
}
