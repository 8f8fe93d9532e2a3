use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::stump::{fit_stump, sorted_orders};
use super::{check_training_data, LearnError, Matrix, ModelParams, Stump, TrainedModel};
use crate::math;

/// Stand-in error for a perfect stump so its vote weight stays finite.
const PERFECT_ERROR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaBoostConfig {
    pub n_estimators: usize,
    pub learning_rate: f64,
}

impl Default for AdaBoostConfig {
    fn default() -> Self {
        AdaBoostConfig {
            n_estimators: 100,
            learning_rate: 0.5,
        }
    }
}

impl AdaBoostConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.n_estimators == 0 {
            return Err(LearnError::InvalidConfig("adaboost.n_estimators must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(LearnError::InvalidConfig("adaboost.learning_rate must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedStump {
    pub stump: Stump,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub config: AdaBoostConfig,
    pub stumps: Vec<WeightedStump>,
}

impl AdaBoostModel {
    pub fn margin(&self, row: &[f64]) -> f64 {
        self.stumps.iter().map(|s| s.alpha * s.stump.predict(row)).sum()
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        math::sigmoid(2.0 * self.margin(row))
    }
}

/// Per-round quantities recorded during boosting.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdaBoostTrace {
    pub errors: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Normalizers `Z_t`.
    pub normalizers: Vec<f64>,
    /// Running product of the normalizers: an upper bound on training error.
    pub bounds: Vec<f64>,
    /// Sum of sample weights after each renormalization.
    pub weight_sums: Vec<f64>,
}

pub fn train_adaboost(x: &Matrix, y: &[bool], cfg: &AdaBoostConfig, seed: u64) -> Result<TrainedModel, LearnError> {
    train_adaboost_traced(x, y, cfg, seed).map(|(m, _)| m)
}

pub fn train_adaboost_traced(
    x: &Matrix,
    y: &[bool],
    cfg: &AdaBoostConfig,
    seed: u64,
) -> Result<(TrainedModel, AdaBoostTrace), LearnError> {
    cfg.validate()?;
    check_training_data(x, y)?;
    let n = x.rows();
    let t: Vec<f64> = y.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
    let orders = sorted_orders(x);
    let mut w = alloc::vec![1.0 / n as f64; n];
    let mut stumps = Vec::new();
    let mut trace = AdaBoostTrace::default();
    let mut bound = 1.0;

    for _ in 0..cfg.n_estimators {
        let (stump, err) = fit_stump(x, &orders, &t, &w);
        if err >= 0.5 {
            break;
        }
        let perfect = err <= 0.0;
        let e = err.max(PERFECT_ERROR);
        let alpha = cfg.learning_rate * 0.5 * math::ln((1.0 - e) / e);
        let mut z = 0.0;
        for i in 0..n {
            w[i] *= math::exp(-alpha * t[i] * stump.predict(x.row(i)));
            z += w[i];
        }
        for wi in &mut w {
            *wi /= z;
        }
        bound *= z;
        trace.errors.push(err);
        trace.alphas.push(alpha);
        trace.normalizers.push(z);
        trace.bounds.push(bound);
        trace.weight_sums.push(w.iter().sum());
        stumps.push(WeightedStump { stump, alpha });
        if perfect {
            break;
        }
    }

    let model = TrainedModel {
        feature_dim: x.cols(),
        seed,
        params: ModelParams::AdaBoost(AdaBoostModel {
            config: cfg.clone(),
            stumps,
        }),
    };
    Ok((model, trace))
}
