//! Per-artifact manifests: enough to rerun the producing command.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::config::{sha256_hex, RunConfig};
use crate::store::write_json;

pub const TOOL: &str = "topocontro";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

impl FileHash {
    pub fn of(path: &Path) -> anyhow::Result<Self> {
        let bytes = std::fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
        Ok(FileHash {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        })
    }

    /// Hash with the path recorded relative to `base`.
    pub fn relative(path: &Path, base: &Path) -> anyhow::Result<Self> {
        let mut h = Self::of(path)?;
        if let Ok(rel) = path.strip_prefix(base) {
            h.path = rel.display().to_string();
        }
        Ok(h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments beyond the config, as given.
    pub args: Vec<String>,
    pub seed: u64,
    pub config_hash: String,
    pub config: RunConfig,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
}

impl Manifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Manifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            args: Vec::new(),
            seed: cfg.seed,
            config_hash: cfg.hash(),
            config: cfg.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn arg(mut self, a: impl Into<String>) -> Self {
        self.args.push(a.into());
        self
    }

    pub fn input(mut self, path: &Path) -> anyhow::Result<Self> {
        self.inputs.push(FileHash::of(path)?);
        Ok(self)
    }

    /// Hash `outputs` (relative to `dir`) and write
    /// `dir/<command>.manifest.json`.
    pub fn write(mut self, dir: &Path, outputs: &[PathBuf]) -> anyhow::Result<PathBuf> {
        for p in outputs {
            self.outputs.push(FileHash::relative(p, dir)?);
        }
        let path = dir.join(format!("{}.manifest.json", self.command));
        write_json(&path, &self)?;
        Ok(path)
    }
}
