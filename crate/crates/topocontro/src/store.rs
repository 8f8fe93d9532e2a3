//! The labeled post store: a directory holding `manifest.json` and
//! `records.jsonl` (one `{"record": ..., "label": ...}` object per line,
//! sorted by post id).

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use topocontro_core::{Label, LabelConfig, ThreadRecord};

use crate::config::label_config_hash;
use crate::jsonl::{read_jsonl, write_jsonl};

pub const STORE_FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const RECORDS: &str = "records.jsonl";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoreManifest {
    pub format_version: u32,
    pub record_count: usize,
    pub label_config_hash: String,
    pub label_config: LabelConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoredPost {
    pub record: ThreadRecord,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Store {
    pub manifest: StoreManifest,
    pub posts: Vec<StoredPost>,
}

impl Store {
    pub fn new(mut posts: Vec<StoredPost>, label_config: LabelConfig) -> Self {
        posts.sort_by(|a, b| a.record.post_id.cmp(&b.record.post_id));
        Store {
            manifest: StoreManifest {
                format_version: STORE_FORMAT_VERSION,
                record_count: posts.len(),
                label_config_hash: label_config_hash(&label_config),
                label_config,
            },
            posts,
        }
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_jsonl(&dir.join(RECORDS), &self.posts)?;
        write_json(&dir.join(MANIFEST), &self.manifest)
    }

    pub fn read(dir: &Path) -> anyhow::Result<Self> {
        let mpath = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&mpath).with_context(|| format!("reading {}", mpath.display()))?;
        let probe: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", mpath.display()))?;
        let found = probe.get("format_version").and_then(serde_json::Value::as_u64);
        if found != Some(u64::from(STORE_FORMAT_VERSION)) {
            anyhow::bail!(
                "store {} has format version {}, this build reads version {STORE_FORMAT_VERSION}",
                dir.display(),
                found.map_or_else(|| "(none)".to_string(), |v| v.to_string())
            );
        }
        let manifest: StoreManifest = serde_json::from_value(probe)?;
        let posts: Vec<StoredPost> = read_jsonl(&dir.join(RECORDS))?;
        if posts.len() != manifest.record_count {
            anyhow::bail!(
                "store {} lists {} records but holds {}",
                dir.display(),
                manifest.record_count,
                posts.len()
            );
        }
        Ok(Store { manifest, posts })
    }

    pub fn records(&self) -> impl Iterator<Item = &ThreadRecord> {
        self.posts.iter().map(|p| &p.record)
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
