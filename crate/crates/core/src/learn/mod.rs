//! In-house classifiers: discrete AdaBoost over stumps, a CART random
//! forest, and a small MLP. All training is deterministic given a seed.
//!
//! Labels are `bool`, `true` meaning controversial. Every model produces a
//! score in `[0, 1]` and predicts `true` when the score exceeds 0.5.

mod adaboost;
mod forest;
mod matrix;
mod mlp;
mod stump;

pub use adaboost::{train_adaboost, train_adaboost_traced, AdaBoostConfig, AdaBoostModel, AdaBoostTrace, WeightedStump};
pub use forest::{
    bootstrap_indices, candidate_count, train_random_forest, train_random_forest_with, tree_seed, fit_tree, ForestConfig, ForestModel, MaxFeatures,
    Tree, TreeNode,
};
pub use matrix::Matrix;
pub use mlp::{gradient_check, train_mlp, Activation, Dense, MlpConfig, MlpModel};
pub use stump::Stump;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub enum LearnError {
    DegenerateLabels,
    EmptyData,
    LengthMismatch { rows: usize, labels: usize },
    DimMismatch { expected: usize, found: usize },
    NonFiniteLoss { epoch: usize },
    InvalidConfig(&'static str),
    /// A ReLU pre-activation sits too close to its kink for finite differences.
    NearKink,
    UnknownModel(String),
}

impl fmt::Display for LearnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnError::DegenerateLabels => write!(f, "degenerate labels: training data needs both classes"),
            LearnError::EmptyData => write!(f, "no training rows"),
            LearnError::LengthMismatch { rows, labels } => {
                write!(f, "{rows} feature rows but {labels} labels")
            }
            LearnError::DimMismatch { expected, found } => {
                write!(f, "model expects {expected} features, input has {found}")
            }
            LearnError::NonFiniteLoss { epoch } => write!(f, "loss became non-finite in epoch {epoch}"),
            LearnError::InvalidConfig(msg) => write!(f, "invalid training config: {msg}"),
            LearnError::NearKink => write!(f, "pre-activation within 1e-3 of the ReLU kink"),
            LearnError::UnknownModel(s) => write!(f, "unknown model kind {s:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[serde(rename = "adaboost")]
    AdaBoost,
    RandomForest,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::AdaBoost, ModelKind::Mlp, ModelKind::RandomForest];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::AdaBoost => "adaboost",
            ModelKind::RandomForest => "random_forest",
            ModelKind::Mlp => "mlp",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = LearnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adaboost" | "ada" => Ok(ModelKind::AdaBoost),
            "random_forest" | "randomforest" | "rf" | "random-forest" => Ok(ModelKind::RandomForest),
            "mlp" => Ok(ModelKind::Mlp),
            _ => Err(LearnError::UnknownModel(String::from(s))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    pub adaboost: AdaBoostConfig,
    pub random_forest: ForestConfig,
    pub mlp: MlpConfig,
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        self.adaboost.validate()?;
        self.random_forest.validate()?;
        self.mlp.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    AdaBoost(AdaBoostModel),
    RandomForest(ForestModel),
    Mlp(MlpModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub feature_dim: usize,
    pub seed: u64,
    pub params: ModelParams,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Prediction {
    pub labels: Vec<bool>,
    pub scores: Vec<f64>,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::AdaBoost(_) => ModelKind::AdaBoost,
            ModelParams::RandomForest(_) => ModelKind::RandomForest,
            ModelParams::Mlp(_) => ModelKind::Mlp,
        }
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        match &self.params {
            ModelParams::AdaBoost(m) => m.score(row),
            ModelParams::RandomForest(m) => m.score(row),
            ModelParams::Mlp(m) => m.score(row),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Prediction, LearnError> {
        if x.rows() > 0 && x.cols() != self.feature_dim {
            return Err(LearnError::DimMismatch {
                expected: self.feature_dim,
                found: x.cols(),
            });
        }
        let scores: Vec<f64> = x.iter_rows().map(|r| self.score_row(r)).collect();
        let labels = scores.iter().map(|&s| s > 0.5).collect();
        Ok(Prediction { labels, scores })
    }
}

pub(crate) fn check_training_data(x: &Matrix, y: &[bool]) -> Result<(), LearnError> {
    if x.rows() != y.len() {
        return Err(LearnError::LengthMismatch {
            rows: x.rows(),
            labels: y.len(),
        });
    }
    if x.rows() == 0 {
        return Err(LearnError::EmptyData);
    }
    let pos = y.iter().filter(|&&b| b).count();
    if pos == 0 || pos == y.len() || y.len() < 2 {
        return Err(LearnError::DegenerateLabels);
    }
    Ok(())
}

/// Train one model kind with its section of `cfg`.
pub fn train(kind: ModelKind, x: &Matrix, y: &[bool], cfg: &TrainingConfig, seed: u64) -> Result<TrainedModel, LearnError> {
    match kind {
        ModelKind::AdaBoost => train_adaboost(x, y, &cfg.adaboost, seed),
        ModelKind::RandomForest => train_random_forest(x, y, &cfg.random_forest, seed),
        ModelKind::Mlp => train_mlp(x, y, &cfg.mlp, seed),
    }
}

/// Built-in grid around the defaults (at most 12 points per model).
pub fn default_grid(kind: ModelKind, base: &TrainingConfig) -> Vec<TrainingConfig> {
    let mut out = Vec::new();
    match kind {
        ModelKind::AdaBoost => {
            for n in [25, 50, 100] {
                for lr in [0.1, 0.5, 1.0] {
                    let mut c = base.clone();
                    c.adaboost = AdaBoostConfig { n_estimators: n, learning_rate: lr };
                    out.push(c);
                }
            }
        }
        ModelKind::RandomForest => {
            for n in [25, 50, 100] {
                for mf in [MaxFeatures::Sqrt, MaxFeatures::Log2] {
                    let mut c = base.clone();
                    c.random_forest.n_estimators = n;
                    c.random_forest.max_features = mf;
                    out.push(c);
                }
            }
        }
        ModelKind::Mlp => {
            for h in [32, 64, 128] {
                for act in [Activation::Relu, Activation::Tanh] {
                    for alpha in [1e-3, 1e-2] {
                        let mut c = base.clone();
                        c.mlp.hidden_sizes = alloc::vec![h];
                        c.mlp.activation = act;
                        c.mlp.l2_alpha = alpha;
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn kinds_parse() {
        assert_eq!("rf".parse::<ModelKind>().unwrap(), ModelKind::RandomForest);
        assert_eq!("AdaBoost".parse::<ModelKind>().unwrap(), ModelKind::AdaBoost);
        assert!("svm".parse::<ModelKind>().is_err());
    }

    #[test]
    fn grids_are_small() {
        let base = TrainingConfig::default();
        for k in ModelKind::ALL {
            let g = default_grid(k, &base);
            assert!(!g.is_empty() && g.len() <= 12);
            assert!(g.iter().all(|c| c.validate().is_ok()));
        }
    }

    #[test]
    fn predict_shapes_and_dim_check() {
        let x = Matrix::from_rows(&[vec![-1.0], vec![-0.5], vec![0.5], vec![1.0]]);
        let y = [false, false, true, true];
        let m = train(ModelKind::AdaBoost, &x, &y, &TrainingConfig::default(), 0).unwrap();
        assert_eq!(m.predict(&Matrix::new(0, 1)).unwrap(), Prediction::default());
        assert_eq!(m.predict(&Matrix::from_rows(&[vec![2.0]])).unwrap().labels, vec![true]);
        assert_eq!(
            m.predict(&Matrix::from_rows(&[vec![1.0, 2.0]])),
            Err(LearnError::DimMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn degenerate_labels_rejected_by_every_model() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0]]);
        for k in ModelKind::ALL {
            assert_eq!(train(k, &x, &[true, true], &TrainingConfig::default(), 1), Err(LearnError::DegenerateLabels));
        }
    }
}
