//! The features CSV: `post_id,label,f0:0,...,f4:127`, labels `C`/`NC`.
//!
//! The file holds the union of the blocks of every requested feature set.
//! A post lacking an embedding has empty cells for that block only; feature
//! sets that need the block drop the post, the others keep it.

use std::path::Path;

use anyhow::Context;
use topocontro_core::features::{BlockTag, FeatureSet};
use topocontro_core::learn::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub post_id: String,
    pub controversial: bool,
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    /// Block and index within the block for every value column.
    pub columns: Vec<(BlockTag, usize)>,
    pub rows: Vec<FeatureRow>,
}

/// Rows of one feature set with complete values.
#[derive(Clone, Debug, PartialEq)]
pub struct SetMatrix {
    pub post_ids: Vec<String>,
    pub x: Matrix,
    pub labels: Vec<bool>,
    pub column_names: Vec<String>,
    /// Rows dropped for missing values.
    pub dropped: usize,
}

pub fn column_name(tag: BlockTag, i: usize) -> String {
    format!("{tag}:{i}")
}

impl FeatureTable {
    pub fn blocks(&self) -> Vec<BlockTag> {
        let mut b: Vec<BlockTag> = self.columns.iter().map(|c| c.0).collect();
        b.dedup();
        b
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        let mut header = vec!["post_id".to_string(), "label".to_string()];
        header.extend(self.columns.iter().map(|&(t, i)| column_name(t, i)));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.post_id.clone(), if row.controversial { "C" } else { "NC" }.to_string()];
            // Display for f64 is the shortest string that parses back exactly.
            rec.extend(row.values.iter().map(|v| v.map_or_else(String::new, |x| x.to_string())));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        let header = r.headers()?.clone();
        if header.get(0) != Some("post_id") || header.get(1) != Some("label") {
            anyhow::bail!("{}: header must start with post_id,label", path.display());
        }
        let mut columns = Vec::new();
        for name in header.iter().skip(2) {
            let (tag, idx) = name
                .split_once(':')
                .with_context(|| format!("{}: bad column {name:?}", path.display()))?;
            let tag: BlockTag = tag.parse().map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
            columns.push((tag, idx.parse::<usize>()?));
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let controversial = match rec.get(1) {
                Some("C") => true,
                Some("NC") => false,
                other => anyhow::bail!("{} line {line}: bad label {other:?}", path.display()),
            };
            let values = rec
                .iter()
                .skip(2)
                .map(|s| {
                    if s.is_empty() {
                        Ok(None)
                    } else {
                        s.parse::<f64>().map(Some)
                    }
                })
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("{} line {line}", path.display()))?;
            rows.push(FeatureRow {
                post_id: rec.get(0).unwrap_or_default().to_string(),
                controversial,
                values,
            });
        }
        Ok(FeatureTable { columns, rows })
    }

    /// Columns of `set`'s blocks, rows complete in those columns.
    pub fn matrix_for(&self, set: &FeatureSet) -> anyhow::Result<SetMatrix> {
        let missing: Vec<String> = set
            .blocks()
            .iter()
            .filter(|t| !self.columns.iter().any(|c| c.0 == **t))
            .map(ToString::to_string)
            .collect();
        if !missing.is_empty() {
            anyhow::bail!(
                "features file lacks block(s) {} needed by {set}; rerun `topocontro features` with that set",
                missing.join(", ")
            );
        }
        let cols: Vec<usize> = set
            .blocks()
            .iter()
            .flat_map(|t| (0..self.columns.len()).filter(move |&j| self.columns[j].0 == *t))
            .collect();
        let mut post_ids = Vec::new();
        let mut labels = Vec::new();
        let mut data = Vec::new();
        let mut dropped = 0;
        for row in &self.rows {
            let vals: Option<Vec<f64>> = cols.iter().map(|&j| row.values[j]).collect();
            match vals {
                Some(v) => {
                    post_ids.push(row.post_id.clone());
                    labels.push(row.controversial);
                    data.push(v);
                }
                None => dropped += 1,
            }
        }
        let x = if data.is_empty() {
            Matrix::new(0, cols.len())
        } else {
            Matrix::from_rows(&data)
        };
        Ok(SetMatrix {
            post_ids,
            x,
            labels,
            column_names: cols.iter().map(|&j| column_name(self.columns[j].0, self.columns[j].1)).collect(),
            dropped,
        })
    }
}
