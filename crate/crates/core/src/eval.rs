//! Split and resampling scenarios, per-class F1, the Imbalance Impact Score,
//! and the scenario matrix.
//!
//! Training scenarios: `A` undersamples the majority to the minority count,
//! `B` grows both classes to `M = factor x minority` (minority drawn with
//! replacement, majority without), `C` keeps the natural distribution.
//! Test scenarios: `a` undersamples the majority, `c` is natural. One model
//! per training set is scored on both test scenarios of the same split.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::features::Standardizer;
use crate::learn::{self, LearnError, Matrix, ModelKind, TrainingConfig};
use crate::math;
use crate::rng::{self, Rng};

#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    TooFewPerClass { controversial: bool, count: usize },
    MissingClass { controversial: bool },
    LengthMismatch { expected: usize, found: usize },
    Empty,
    OutOfRange { name: &'static str, value: f64 },
    InvalidConfig(&'static str),
    Learn(LearnError),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = |c: &bool| if *c { "controversial" } else { "non-controversial" };
        match self {
            EvalError::TooFewPerClass { controversial, count } => {
                write!(f, "split needs at least 2 {} posts, found {count}", class(controversial))
            }
            EvalError::MissingClass { controversial } => write!(f, "no {} posts in the set", class(controversial)),
            EvalError::LengthMismatch { expected, found } => write!(f, "length mismatch: {expected} vs {found}"),
            EvalError::Empty => write!(f, "empty input"),
            EvalError::OutOfRange { name, value } => write!(f, "{name} = {value} is outside [0, 1]"),
            EvalError::InvalidConfig(msg) => write!(f, "invalid evaluation config: {msg}"),
            EvalError::Learn(e) => write!(f, "{e}"),
        }
    }
}

impl From<LearnError> for EvalError {
    fn from(e: LearnError) -> Self {
        EvalError::Learn(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrainScenario {
    A,
    B,
    C,
}

impl TrainScenario {
    pub const ALL: [TrainScenario; 3] = [TrainScenario::A, TrainScenario::B, TrainScenario::C];

    pub fn as_str(&self) -> &'static str {
        match self {
            TrainScenario::A => "A",
            TrainScenario::B => "B",
            TrainScenario::C => "C",
        }
    }
}

impl fmt::Display for TrainScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrainScenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(TrainScenario::A),
            "B" | "b" => Ok(TrainScenario::B),
            "C" | "c" => Ok(TrainScenario::C),
            other => Err(alloc::format!("unknown training scenario {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestScenario {
    #[serde(rename = "a")]
    Balanced,
    #[serde(rename = "c")]
    Natural,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub train_frac: f64,
    pub stratified: bool,
    /// Scenario B grows each class to this multiple of the minority count.
    pub oversample_factor: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            train_frac: 0.8,
            stratified: true,
            oversample_factor: 2.0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return Err(EvalError::InvalidConfig("train_frac must lie strictly between 0 and 1"));
        }
        if !self.stratified {
            return Err(EvalError::InvalidConfig("only stratified splits are supported"));
        }
        if !(self.oversample_factor >= 1.0 && self.oversample_factor.is_finite()) {
            return Err(EvalError::InvalidConfig("oversample_factor must be at least 1"));
        }
        Ok(())
    }
}

fn by_class(idx: &[usize], labels: &[bool]) -> (Vec<usize>, Vec<usize>) {
    idx.iter().partition(|&&i| labels[i])
}

/// Stratified split of `0..labels.len()` into sorted (train, test) indices.
///
/// Each class contributes `round(train_frac * n)` rows to training, clamped
/// so both sides keep at least one row of it.
pub fn split(labels: &[bool], cfg: &ScenarioConfig, seed: u64) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    cfg.validate()?;
    let all: Vec<usize> = (0..labels.len()).collect();
    let (pos, neg) = by_class(&all, labels);
    for (class, members) in [(true, &pos), (false, &neg)] {
        if members.len() < 2 {
            return Err(EvalError::TooFewPerClass {
                controversial: class,
                count: members.len(),
            });
        }
    }
    let mut r = rng::rng_for(seed, &[rng::key("split")]);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut members in [pos, neg] {
        let n = members.len();
        let k = (math::round(cfg.train_frac * n as f64) as usize).clamp(1, n - 1);
        members.shuffle(&mut r);
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

fn undersample(members: &[usize], k: usize, r: &mut Rng) -> Vec<usize> {
    let mut out: Vec<usize> = index::sample(r, members.len(), k).into_iter().map(|j| members[j]).collect();
    out.sort_unstable();
    out
}

/// Apply a training scenario to the training indices. The result may repeat
/// indices (scenario B) and is sorted.
pub fn resample_train(
    train: &[usize],
    labels: &[bool],
    scenario: TrainScenario,
    cfg: &ScenarioConfig,
    r: &mut Rng,
) -> Result<Vec<usize>, EvalError> {
    if scenario == TrainScenario::C {
        return Ok(train.to_vec());
    }
    let (pos, neg) = by_class(train, labels);
    if pos.is_empty() {
        return Err(EvalError::MissingClass { controversial: true });
    }
    if neg.is_empty() {
        return Err(EvalError::MissingClass { controversial: false });
    }
    let (minority, majority) = if pos.len() <= neg.len() { (pos, neg) } else { (neg, pos) };
    let mut out = match scenario {
        TrainScenario::A => {
            let mut v = minority.clone();
            v.extend(undersample(&majority, minority.len(), r));
            v
        }
        TrainScenario::B => {
            let m = math::round(cfg.oversample_factor * minority.len() as f64) as usize;
            // Keep every minority row, then top up with draws with replacement.
            let mut v = minority.clone();
            for _ in minority.len()..m {
                v.push(minority[r.gen_range(0..minority.len())]);
            }
            let take = m.min(majority.len());
            if take == majority.len() {
                v.extend_from_slice(&majority);
                for _ in take..m {
                    v.push(majority[r.gen_range(0..majority.len())]);
                }
            } else {
                v.extend(undersample(&majority, take, r));
            }
            v
        }
        TrainScenario::C => unreachable!(),
    };
    out.sort_unstable();
    Ok(out)
}

/// Apply a test scenario to the test indices.
pub fn resample_test(test: &[usize], labels: &[bool], scenario: TestScenario, r: &mut Rng) -> Result<Vec<usize>, EvalError> {
    let (pos, neg) = by_class(test, labels);
    if pos.is_empty() {
        return Err(EvalError::MissingClass { controversial: true });
    }
    match scenario {
        TestScenario::Natural => Ok(test.to_vec()),
        TestScenario::Balanced => {
            if neg.is_empty() {
                return Err(EvalError::MissingClass { controversial: false });
            }
            let (minority, majority) = if pos.len() <= neg.len() { (pos, neg) } else { (neg, pos) };
            let mut v = minority.clone();
            v.extend(undersample(&majority, minority.len(), r));
            v.sort_unstable();
            Ok(v)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub f1_controversial: f64,
    pub f1_noncontroversial: f64,
    pub support_controversial: usize,
    pub support_noncontroversial: usize,
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let r = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn f1_per_class(y_true: &[bool], y_pred: &[bool]) -> Result<Metrics, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut c = [[0usize; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        c[usize::from(t)][usize::from(p)] += 1;
    }
    let (tn, fp, fn_, tp) = (c[0][0], c[0][1], c[1][0], c[1][1]);
    Ok(Metrics {
        f1_controversial: f1(tp, fp, fn_),
        f1_noncontroversial: f1(tn, fn_, fp),
        support_controversial: tp + fn_,
        support_noncontroversial: tn + fp,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceImpactScore {
    pub value: f64,
    pub fa: f64,
    pub fc: f64,
}

impl ImbalanceImpactScore {
    /// The value rounded to three decimals, as reported.
    pub fn rounded(&self) -> f64 {
        math::round(self.value * 1000.0) / 1000.0
    }
}

/// `100 * fa * fc * (1 - |fa - fc|)`.
pub fn imbalance_impact(fa: f64, fc: f64) -> Result<ImbalanceImpactScore, EvalError> {
    for (name, v) in [("fa", fa), ("fc", fc)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(EvalError::OutOfRange { name, value: v });
        }
    }
    let d = if fa > fc { fa - fc } else { fc - fa };
    Ok(ImbalanceImpactScore {
        value: 100.0 * (fa * fc) * (1.0 - d),
        fa,
        fc,
    })
}

/// Mean and sample standard deviation (0 for a single value).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Stat {
        if xs.is_empty() {
            return Stat::default();
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() < 2 {
            0.0
        } else {
            math::sqrt(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0))
        };
        Stat { mean, sd }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub balanced: Metrics,
    pub natural: Metrics,
    pub impact: ImbalanceImpactScore,
    pub train_controversial: usize,
    pub train_noncontroversial: usize,
}

/// Indices used by one seed: the split and both test sets.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedPlan {
    pub train: Vec<usize>,
    pub resampled_train: Vec<usize>,
    pub test: Vec<usize>,
    pub test_balanced: Vec<usize>,
}

/// Split and resample for one seed. The split and the test-side undersampling
/// depend only on the seed, so every cell of a matrix shares them.
pub fn plan_seed(labels: &[bool], scenario: TrainScenario, cfg: &ScenarioConfig, seed: u64) -> Result<SeedPlan, EvalError> {
    let (train, test) = split(labels, cfg, seed)?;
    let mut tr = rng::rng_for(seed, &[rng::key("train"), scenario as u64]);
    let resampled_train = resample_train(&train, labels, scenario, cfg, &mut tr)?;
    let mut te = rng::rng_for(seed, &[rng::key("test")]);
    let test_balanced = resample_test(&test, labels, TestScenario::Balanced, &mut te)?;
    resample_test(&test, labels, TestScenario::Natural, &mut te)?;
    Ok(SeedPlan {
        train,
        resampled_train,
        test,
        test_balanced,
    })
}

pub fn model_seed(seed: u64, kind: ModelKind) -> u64 {
    rng::derive(seed, &[rng::key("model"), rng::key(kind.as_str())])
}

/// Train once on the resampled split and score both test scenarios.
///
/// Features are standardized with statistics of the training split before
/// resampling.
pub fn evaluate_seed(
    x: &Matrix,
    labels: &[bool],
    scenario: TrainScenario,
    kind: ModelKind,
    training: &TrainingConfig,
    cfg: &ScenarioConfig,
    seed: u64,
) -> Result<SeedOutcome, EvalError> {
    if x.rows() != labels.len() {
        return Err(EvalError::LengthMismatch {
            expected: labels.len(),
            found: x.rows(),
        });
    }
    let plan = plan_seed(labels, scenario, cfg, seed)?;
    let scaler = Standardizer::fit(plan.train.iter().map(|&i| x.row(i)), x.cols());
    let xs = x.map_rows(|r| scaler.transform_row(r));
    let xt = xs.select(&plan.resampled_train);
    let yt: Vec<bool> = plan.resampled_train.iter().map(|&i| labels[i]).collect();
    let model = learn::train(kind, &xt, &yt, training, model_seed(seed, kind))?;

    let score = |idx: &[usize]| -> Result<Metrics, EvalError> {
        let pred = model.predict(&xs.select(idx))?;
        let truth: Vec<bool> = idx.iter().map(|&i| labels[i]).collect();
        f1_per_class(&truth, &pred.labels)
    };
    let balanced = score(&plan.test_balanced)?;
    let natural = score(&plan.test)?;
    let impact = imbalance_impact(balanced.f1_controversial, natural.f1_controversial)?;
    Ok(SeedOutcome {
        seed,
        balanced,
        natural,
        impact,
        train_controversial: yt.iter().filter(|&&b| b).count(),
        train_noncontroversial: yt.iter().filter(|&&b| !b).count(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub scenario: TrainScenario,
    pub model: ModelKind,
    pub features: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub fc_a: Stat,
    pub fc_c: Stat,
    pub impact: Stat,
    pub seeds: Vec<SeedOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub key: CellKey,
    pub outcome: Result<CellStats, String>,
}

/// Fold per-seed outcomes into a cell. Any failed seed fails the cell.
pub fn aggregate(key: CellKey, runs: Vec<Result<SeedOutcome, EvalError>>) -> CellResult {
    let mut seeds = Vec::with_capacity(runs.len());
    for r in runs {
        match r {
            Ok(s) => seeds.push(s),
            Err(e) => {
                return CellResult {
                    key,
                    outcome: Err(e.to_string()),
                }
            }
        }
    }
    if seeds.is_empty() {
        return CellResult {
            key,
            outcome: Err(String::from("no seeds")),
        };
    }
    let col = |f: fn(&SeedOutcome) -> f64| Stat::of(&seeds.iter().map(f).collect::<Vec<_>>());
    let stats = CellStats {
        fc_a: col(|s| s.balanced.f1_controversial),
        fc_c: col(|s| s.natural.f1_controversial),
        impact: col(|s| s.impact.value),
        seeds: Vec::new(),
    };
    CellResult {
        key,
        outcome: Ok(CellStats { seeds, ..stats }),
    }
}

/// Feature matrix and labels for one named feature set.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureData {
    pub name: String,
    pub x: Matrix,
    pub labels: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub cells: Vec<CellResult>,
}

/// Every (scenario, model, feature set) cell over `seeds`, serially.
pub fn run_matrix(
    data: &[FeatureData],
    scenarios: &[TrainScenario],
    models: &[ModelKind],
    seeds: &[u64],
    training: &TrainingConfig,
    cfg: &ScenarioConfig,
) -> EvalReport {
    let mut cells = Vec::new();
    for &scenario in scenarios {
        for &model in models {
            for d in data {
                let runs = seeds
                    .iter()
                    .map(|&s| evaluate_seed(&d.x, &d.labels, scenario, model, training, cfg, s))
                    .collect();
                cells.push(aggregate(
                    CellKey {
                        scenario,
                        model,
                        features: d.name.clone(),
                    },
                    runs,
                ));
            }
        }
    }
    EvalReport { cells }
}

/// Pick the grid point with the best controversial-class F1 on a stratified
/// holdout carved from `x`. Ties keep the earlier grid point.
pub fn grid_search(
    kind: ModelKind,
    x: &Matrix,
    labels: &[bool],
    base: &TrainingConfig,
    seed: u64,
) -> Result<(TrainingConfig, f64), EvalError> {
    let (fit, hold) = split(labels, &ScenarioConfig::default(), rng::derive(seed, &[rng::key("grid")]))?;
    let xf = x.select(&fit);
    let yf: Vec<bool> = fit.iter().map(|&i| labels[i]).collect();
    let xh = x.select(&hold);
    let yh: Vec<bool> = hold.iter().map(|&i| labels[i]).collect();
    let mut best: Option<(TrainingConfig, f64)> = None;
    for cfg in learn::default_grid(kind, base) {
        let m = learn::train(kind, &xf, &yf, &cfg, model_seed(seed, kind))?;
        let f = f1_per_class(&yh, &m.predict(&xh)?.labels)?.f1_controversial;
        if best.as_ref().is_none_or(|(_, b)| f > *b) {
            best = Some((cfg, f));
        }
    }
    best.ok_or(EvalError::Empty)
}
