//! Thread dumps and embedding files, one JSON object per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use topocontro_core::features::{EmbeddingScope, EmbeddingTable};
use topocontro_core::ThreadRecord;

/// A line that failed to parse or validate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineError {
    pub file: PathBuf,
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedDump {
    pub records: Vec<ThreadRecord>,
    pub errors: Vec<LineError>,
}

/// Parse a thread dump. Blank lines are skipped; malformed or invalid lines
/// are reported with their 1-based line numbers. Text fields get their
/// whitespace collapsed.
pub fn parse_dump(path: &Path) -> anyhow::Result<ParsedDump> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_dump_from(BufReader::new(file), path)
}

pub fn parse_dump_from<R: BufRead>(reader: R, path: &Path) -> anyhow::Result<ParsedDump> {
    let mut out = ParsedDump::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("reading {} line {}", path.display(), i + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| LineError {
            file: path.to_path_buf(),
            line: i + 1,
            message,
        };
        match serde_json::from_str::<ThreadRecord>(&line) {
            Ok(mut rec) => match rec.validate() {
                Ok(()) => {
                    rec.normalize_whitespace();
                    out.records.push(rec);
                }
                Err(e) => out.errors.push(err(e.to_string())),
            },
            Err(e) => out.errors.push(err(e.to_string())),
        }
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for row in rows {
        serde_json::to_writer(&mut w, &row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{} line {}", path.display(), i + 1))?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingRow {
    /// `"post"` or `"comment"`; may be omitted in single-scope files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    pub id: String,
    pub vector: Vec<f64>,
}

/// Post and comment embedding tables being filled from one or more files.
#[derive(Clone, Debug, PartialEq)]
pub struct Embeddings {
    pub posts: EmbeddingTable,
    pub comments: EmbeddingTable,
}

impl Default for Embeddings {
    fn default() -> Self {
        Embeddings {
            posts: EmbeddingTable::new(EmbeddingScope::Post),
            comments: EmbeddingTable::new(EmbeddingScope::Comment),
        }
    }
}

impl Embeddings {
    /// Add rows from a JSONL file. Rows without a `scope` take `default`.
    pub fn load(&mut self, path: &Path, default: Option<EmbeddingScope>) -> anyhow::Result<()> {
        for (i, row) in read_jsonl::<EmbeddingRow>(path)?.into_iter().enumerate() {
            let scope = match (row.scope.as_deref(), default) {
                (Some("post"), _) => EmbeddingScope::Post,
                (Some("comment"), _) => EmbeddingScope::Comment,
                (None, Some(d)) => d,
                (Some(other), _) => anyhow::bail!("{} row {}: unknown scope {other:?}", path.display(), i + 1),
                (None, None) => anyhow::bail!("{} row {}: missing scope", path.display(), i + 1),
            };
            if let Some(d) = default {
                if d != scope {
                    anyhow::bail!("{} row {}: {scope:?} row in a {d:?} embedding file", path.display(), i + 1);
                }
            }
            if row.vector.iter().any(|v| !v.is_finite()) {
                anyhow::bail!("{} row {}: non-finite value", path.display(), i + 1);
            }
            let table = match scope {
                EmbeddingScope::Post => &mut self.posts,
                EmbeddingScope::Comment => &mut self.comments,
            };
            table
                .insert(row.id, row.vector)
                .map_err(|e| anyhow::anyhow!("{} row {}: {e}", path.display(), i + 1))?;
        }
        if let (Some(a), Some(b)) = (self.posts.dim(), self.comments.dim()) {
            if a != b {
                anyhow::bail!("post embeddings have dimension {a} but comment embeddings {b}");
            }
        }
        Ok(())
    }
}
