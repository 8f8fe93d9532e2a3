//! Run configuration: one TOML file, every key optional, unknown keys rejected.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use topocontro_core::eval::{ScenarioConfig, TrainScenario};
use topocontro_core::features::FeatureSet;
use topocontro_core::graph::{DistanceMode, GraphConfig};
use topocontro_core::learn::{ModelKind, TrainingConfig};
use topocontro_core::synth::SynthConfig;
use topocontro_core::tda::EssentialPolicy;
use topocontro_core::LabelConfig;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Master seed for every random choice in the pipeline.
    pub seed: u64,
    pub label: LabelConfig,
    pub graph: GraphConfig,
    pub tda: TdaSettings,
    pub features: FeatureSettings,
    pub train: TrainingConfig,
    pub eval: EvalSettings,
    pub synth: SynthConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TdaSettings {
    /// `"hop"` or `"invweight"`.
    pub metric: DistanceMode,
    /// Persistence images are `resolution x resolution` per dimension.
    pub resolution: usize,
    /// Fixed Rips cutoff; unset uses each post's largest finite distance.
    pub eps_max: Option<f64>,
    pub essential: EssentialPolicy,
}

impl Default for TdaSettings {
    fn default() -> Self {
        TdaSettings {
            metric: DistanceMode::Hop,
            resolution: 8,
            eps_max: None,
            essential: EssentialPolicy::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureSettings {
    /// Feature sets to assemble and evaluate, e.g. `"f0+f3+f4"`.
    pub sets: Vec<String>,
    /// JSONL file of precomputed embeddings for f1/f2.
    pub embeddings: Option<PathBuf>,
    /// Include the post vector in the f2 mean.
    pub pool_includes_post: bool,
}

impl Default for FeatureSettings {
    fn default() -> Self {
        FeatureSettings {
            sets: vec!["f0".into(), "f0+f3+f4".into()],
            embeddings: None,
            pool_includes_post: true,
        }
    }
}

impl FeatureSettings {
    pub fn parsed_sets(&self) -> anyhow::Result<Vec<FeatureSet>> {
        if self.sets.is_empty() {
            anyhow::bail!("features.sets is empty");
        }
        self.sets
            .iter()
            .map(|s| s.parse::<FeatureSet>().map_err(|e| anyhow::anyhow!("feature set {s:?}: {e}")))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSettings {
    pub scenarios: Vec<TrainScenario>,
    pub models: Vec<ModelKind>,
    /// Number of seeds; seed `i` is `seed + i`.
    pub seeds: usize,
    pub split: ScenarioConfig,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            scenarios: TrainScenario::ALL.to_vec(),
            models: ModelKind::ALL.to_vec(),
            seeds: 5,
            split: ScenarioConfig::default(),
        }
    }
}

impl EvalSettings {
    pub fn seed_list(&self, master: u64) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| master.wrapping_add(i)).collect()
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.tda.resolution == 0 {
            anyhow::bail!("tda.resolution must be at least 1");
        }
        if let Some(e) = self.tda.eps_max {
            if !(e.is_finite() && e >= 0.0) {
                anyhow::bail!("tda.eps_max must be finite and nonnegative");
            }
        }
        if self.eval.seeds == 0 {
            anyhow::bail!("eval.seeds must be at least 1");
        }
        self.features.parsed_sets()?;
        self.train.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        self.eval.split.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }

    /// Hash of the labeling rule alone, recorded in the store manifest.
    pub fn label_hash(&self) -> String {
        label_config_hash(&self.label)
    }
}

pub fn label_config_hash(cfg: &LabelConfig) -> String {
    sha256_hex(&serde_json::to_vec(cfg).expect("label config serializes"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("sed = 3").is_err());
        assert!(RunConfig::from_toml("[tda]\nresolutoin = 4").is_err());
    }

    #[test]
    fn nested_sections_parse() {
        let cfg = RunConfig::from_toml(
            r#"
seed = 7
[label]
min_comments = 10
[tda]
metric = "invweight"
resolution = 4
[train.adaboost]
n_estimators = 30
[eval]
scenarios = ["A", "C"]
models = ["adaboost"]
seeds = 2
"#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.label.min_comments, 10);
        assert_eq!(cfg.tda.metric, DistanceMode::InverseWeight);
        assert_eq!(cfg.train.adaboost.n_estimators, 30);
        assert_eq!(cfg.train.adaboost.learning_rate, 0.5);
        assert_eq!(cfg.eval.scenarios, vec![TrainScenario::A, TrainScenario::C]);
        assert_eq!(cfg.eval.seed_list(cfg.seed), vec![7, 8]);
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(RunConfig::from_toml("[eval]\nseeds = 0").is_err());
        assert!(RunConfig::from_toml("[features]\nsets = [\"f9\"]").is_err());
        assert!(RunConfig::from_toml("[train.mlp]\nhidden_sizes = []").is_err());
    }
}
