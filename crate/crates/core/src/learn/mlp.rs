use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{check_training_data, LearnError, Matrix, ModelParams, TrainedModel};
use crate::math;
use crate::rng;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
const KINK: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
    Logistic,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => math::tanh(z),
            Activation::Logistic => math::sigmoid(z),
            Activation::Identity => z,
        }
    }

    /// Derivative in terms of the pre-activation `z` and output `a`.
    #[inline]
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
            Activation::Logistic => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpConfig {
    pub hidden_sizes: Vec<usize>,
    pub activation: Activation,
    pub learning_rate: f64,
    /// L2 penalty strength.
    pub l2_alpha: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_sizes: vec![64],
            activation: Activation::Relu,
            learning_rate: 1e-3,
            l2_alpha: 1e-3,
            epochs: 200,
            batch_size: 32,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.hidden_sizes.is_empty() || self.hidden_sizes.len() > 2 {
            return Err(LearnError::InvalidConfig("mlp.hidden_sizes must list one or two layers"));
        }
        if self.hidden_sizes.contains(&0) {
            return Err(LearnError::InvalidConfig("mlp.hidden_sizes entries must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(LearnError::InvalidConfig("mlp.learning_rate must be positive"));
        }
        if !(self.l2_alpha >= 0.0 && self.l2_alpha.is_finite()) {
            return Err(LearnError::InvalidConfig("mlp.l2_alpha must be non-negative"));
        }
        if self.batch_size == 0 {
            return Err(LearnError::InvalidConfig("mlp.batch_size must be at least 1"));
        }
        Ok(())
    }
}

/// One fully connected layer, as a view into the flat parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    /// Offset of the `outputs x inputs` row-major weights; biases follow.
    pub offset: usize,
}

impl Dense {
    fn weights(&self) -> core::ops::Range<usize> {
        self.offset..self.offset + self.inputs * self.outputs
    }

    fn bias(&self) -> core::ops::Range<usize> {
        let s = self.offset + self.inputs * self.outputs;
        s..s + self.outputs
    }
}

/// Feed-forward network with a single logistic output unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// Training settings; `None` for hand-built networks.
    pub config: Option<MlpConfig>,
    pub activation: Activation,
    /// Layer widths from input to output; the last entry is 1.
    pub sizes: Vec<usize>,
    /// All weights and biases, layer by layer.
    pub params: Vec<f64>,
}

impl MlpModel {
    pub fn zeros(inputs: usize, hidden: &[usize], activation: Activation) -> Self {
        let mut sizes = vec![inputs];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let count = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        MlpModel {
            config: None,
            activation,
            sizes,
            params: vec![0.0; count],
        }
    }

    /// Glorot-uniform initialization of weights and biases.
    pub fn init(inputs: usize, hidden: &[usize], activation: Activation, seed: u64) -> Self {
        let mut m = Self::zeros(inputs, hidden, activation);
        let mut r = rng::rng_for(seed, &[0]);
        for layer in m.layers() {
            let bound = math::sqrt(6.0 / (layer.inputs + layer.outputs) as f64);
            for p in &mut m.params[layer.weights().start..layer.bias().end] {
                *p = r.gen_range(-bound..bound);
            }
        }
        m
    }

    pub fn layers(&self) -> Vec<Dense> {
        let mut offset = 0;
        self.sizes
            .windows(2)
            .map(|w| {
                let d = Dense {
                    inputs: w[0],
                    outputs: w[1],
                    offset,
                };
                offset += w[0] * w[1] + w[1];
                d
            })
            .collect()
    }

    /// Pre-activations and activations of every layer for one row.
    fn forward(&self, layers: &[Dense], row: &[f64], zs: &mut [Vec<f64>], acts: &mut [Vec<f64>]) {
        acts[0].clear();
        acts[0].extend_from_slice(row);
        let last = layers.len() - 1;
        for (l, layer) in layers.iter().enumerate() {
            let w = &self.params[layer.weights()];
            let b = &self.params[layer.bias()];
            let (prev, next) = acts.split_at_mut(l + 1);
            let input = &prev[l];
            let z = &mut zs[l];
            z.clear();
            for o in 0..layer.outputs {
                let wr = &w[o * layer.inputs..(o + 1) * layer.inputs];
                z.push(b[o] + wr.iter().zip(input).map(|(a, c)| a * c).sum::<f64>());
            }
            let a = &mut next[0];
            a.clear();
            if l == last {
                a.extend_from_slice(z);
            } else {
                a.extend(z.iter().map(|&v| self.activation.apply(v)));
            }
        }
    }

    fn buffers(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let zs = self.sizes[1..].iter().map(|&s| Vec::with_capacity(s)).collect();
        let acts = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        (zs, acts)
    }

    /// Output logit for one row.
    pub fn logit(&self, row: &[f64]) -> f64 {
        let layers = self.layers();
        let (mut zs, mut acts) = self.buffers();
        self.forward(&layers, row, &mut zs, &mut acts);
        zs[layers.len() - 1][0]
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        math::sigmoid(self.logit(row))
    }

    fn weight_sq_sum(&self, layers: &[Dense]) -> f64 {
        layers
            .iter()
            .flat_map(|l| self.params[l.weights()].iter())
            .map(|w| w * w)
            .sum()
    }

    /// Mean cross-entropy over `rows` plus `alpha / (2 |rows|)` times the
    /// squared weight norm.
    pub fn loss(&self, x: &Matrix, y: &[bool], rows: &[usize], alpha: f64) -> f64 {
        let layers = self.layers();
        let b = rows.len() as f64;
        let ce: f64 = rows
            .iter()
            .map(|&i| {
                let z = self.logit(x.row(i));
                softplus(z) - if y[i] { z } else { 0.0 }
            })
            .sum();
        ce / b + alpha / (2.0 * b) * self.weight_sq_sum(&layers)
    }

    /// Loss over `rows` and its gradient with respect to `params`.
    pub fn loss_and_gradient(&self, x: &Matrix, y: &[bool], rows: &[usize], alpha: f64) -> (f64, Vec<f64>) {
        let layers = self.layers();
        let last = layers.len() - 1;
        let b = rows.len() as f64;
        let mut grad = vec![0.0; self.params.len()];
        let (mut zs, mut acts) = self.buffers();
        let mut delta: Vec<f64> = Vec::new();
        let mut prev_delta: Vec<f64> = Vec::new();
        let mut ce = 0.0;

        for &i in rows {
            self.forward(&layers, x.row(i), &mut zs, &mut acts);
            let z = zs[last][0];
            let t = if y[i] { 1.0 } else { 0.0 };
            ce += softplus(z) - t * z;
            delta.clear();
            delta.push((math::sigmoid(z) - t) / b);
            for l in (0..=last).rev() {
                let layer = layers[l];
                let input = &acts[l];
                let wr = layer.weights();
                let br = layer.bias();
                for (o, &d) in delta.iter().enumerate() {
                    grad[br.start + o] += d;
                    let g = &mut grad[wr.start + o * layer.inputs..wr.start + (o + 1) * layer.inputs];
                    for (gv, &a) in g.iter_mut().zip(input) {
                        *gv += d * a;
                    }
                }
                if l == 0 {
                    break;
                }
                let w = &self.params[wr];
                prev_delta.clear();
                prev_delta.resize(layer.inputs, 0.0);
                for (o, &d) in delta.iter().enumerate() {
                    for (pd, &wv) in prev_delta.iter_mut().zip(&w[o * layer.inputs..(o + 1) * layer.inputs]) {
                        *pd += d * wv;
                    }
                }
                for (k, pd) in prev_delta.iter_mut().enumerate() {
                    *pd *= self.activation.derivative(zs[l - 1][k], acts[l][k]);
                }
                core::mem::swap(&mut delta, &mut prev_delta);
            }
        }

        for layer in &layers {
            for j in layer.weights() {
                grad[j] += alpha / b * self.params[j];
            }
        }
        (ce / b + alpha / (2.0 * b) * self.weight_sq_sum(&layers), grad)
    }

    /// Smallest |pre-activation| over hidden units and the given rows.
    pub fn min_hidden_preactivation(&self, x: &Matrix, rows: &[usize]) -> f64 {
        let layers = self.layers();
        let (mut zs, mut acts) = self.buffers();
        let mut m = f64::INFINITY;
        for &i in rows {
            self.forward(&layers, x.row(i), &mut zs, &mut acts);
            for z in &zs[..layers.len() - 1] {
                for v in z {
                    m = m.min(v.abs());
                }
            }
        }
        m
    }
}

#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + math::ln(1.0 + math::exp(-z))
    } else {
        math::ln(1.0 + math::exp(z))
    }
}

/// Largest relative difference between the analytic gradient and central
/// finite differences with step `h`, over every parameter.
///
/// Entries are compared as `|a - n| / max(|a| + |n|, 1e-8)`. With ReLU
/// hidden units the check refuses points where a pre-activation is within
/// 1e-3 of zero; callers resample in that case.
pub fn gradient_check(model: &MlpModel, x: &Matrix, y: &[bool], alpha: f64, h: f64) -> Result<f64, LearnError> {
    let rows: Vec<usize> = (0..x.rows()).collect();
    if rows.is_empty() {
        return Err(LearnError::EmptyData);
    }
    if model.activation == Activation::Relu && model.min_hidden_preactivation(x, &rows) < KINK {
        return Err(LearnError::NearKink);
    }
    let (_, analytic) = model.loss_and_gradient(x, y, &rows, alpha);
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (j, &a) in analytic.iter().enumerate() {
        let p = model.params[j];
        probe.params[j] = p + h;
        let up = probe.loss(x, y, &rows, alpha);
        probe.params[j] = p - h;
        let down = probe.loss(x, y, &rows, alpha);
        probe.params[j] = p;
        let numeric = (up - down) / (2.0 * h);
        worst = worst.max((a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-8));
    }
    Ok(worst)
}

pub fn train_mlp(x: &Matrix, y: &[bool], cfg: &MlpConfig, seed: u64) -> Result<TrainedModel, LearnError> {
    cfg.validate()?;
    check_training_data(x, y)?;
    let mut model = MlpModel::init(x.cols(), &cfg.hidden_sizes, cfg.activation, seed);
    let mut shuffle = rng::rng_for(seed, &[1]);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut m = vec![0.0; model.params.len()];
    let mut v = vec![0.0; model.params.len()];
    let (mut b1t, mut b2t) = (1.0, 1.0);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle);
        for batch in order.chunks(cfg.batch_size) {
            let (loss, g) = model.loss_and_gradient(x, y, batch, cfg.l2_alpha);
            if !loss.is_finite() {
                return Err(LearnError::NonFiniteLoss { epoch });
            }
            b1t *= BETA1;
            b2t *= BETA2;
            let step = cfg.learning_rate * math::sqrt(1.0 - b2t) / (1.0 - b1t);
            for j in 0..g.len() {
                m[j] = BETA1 * m[j] + (1.0 - BETA1) * g[j];
                v[j] = BETA2 * v[j] + (1.0 - BETA2) * g[j] * g[j];
                model.params[j] -= step * m[j] / (math::sqrt(v[j]) + ADAM_EPS);
            }
        }
    }
    model.config = Some(cfg.clone());
    if model.params.iter().any(|p| !p.is_finite()) {
        return Err(LearnError::NonFiniteLoss { epoch: cfg.epochs });
    }
    Ok(TrainedModel {
        feature_dim: x.cols(),
        seed,
        params: ModelParams::Mlp(model),
    })
}
