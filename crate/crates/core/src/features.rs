//! Per-post feature blocks.
//!
//! * `f0`: comment count, user count, undirected edge count, average degree.
//! * `f1`: the post's precomputed text embedding.
//! * `f2`: mean of the post embedding and its comments' embeddings.
//! * `f3`: the 13-class triad census.
//! * `f4`: flattened H0 and H1 persistence images.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{build_interaction_graph, GraphConfig, InteractionGraph};
use crate::label::Label;
use crate::math;
use crate::motifs::{triad_census, MOTIF_CLASSES};
use crate::record::ThreadRecord;
use crate::tda::{f4_vector, TdaConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockTag {
    F0,
    F1,
    F2,
    F3,
    F4,
}

impl BlockTag {
    pub const ALL: [BlockTag; 5] = [BlockTag::F0, BlockTag::F1, BlockTag::F2, BlockTag::F3, BlockTag::F4];

    pub fn as_str(&self) -> &'static str {
        match self {
            BlockTag::F0 => "f0",
            BlockTag::F1 => "f1",
            BlockTag::F2 => "f2",
            BlockTag::F3 => "f3",
            BlockTag::F4 => "f4",
        }
    }

    pub fn needs_embeddings(&self) -> bool {
        matches!(self, BlockTag::F1 | BlockTag::F2)
    }
}

impl fmt::Display for BlockTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BlockTag {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BlockTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| FeatureError::UnknownBlock(String::from(s)))
    }
}

/// An ordered, duplicate-free set of blocks such as `f0+f3+f4`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureSet(Vec<BlockTag>);

impl FeatureSet {
    pub fn new(mut tags: Vec<BlockTag>) -> Result<Self, FeatureError> {
        if tags.is_empty() {
            return Err(FeatureError::EmptyFeatureSet);
        }
        tags.sort();
        tags.dedup();
        Ok(FeatureSet(tags))
    }

    pub fn blocks(&self) -> &[BlockTag] {
        &self.0
    }

    pub fn contains(&self, tag: BlockTag) -> bool {
        self.0.contains(&tag)
    }

    pub fn needs_embeddings(&self) -> bool {
        self.0.iter().any(BlockTag::needs_embeddings)
    }

    /// Union of blocks.
    pub fn union(&self, other: &FeatureSet) -> FeatureSet {
        let mut tags = self.0.clone();
        tags.extend_from_slice(&other.0);
        FeatureSet::new(tags).expect("nonempty")
    }
}

impl FromStr for FeatureSet {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tags = s
            .split('+')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        FeatureSet::new(tags)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            f.write_str(t.as_str())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeatureError {
    UnknownBlock(String),
    EmptyFeatureSet,
    RaggedDimension { id: String, expected: usize, found: usize },
    DuplicateEmbedding(String),
    EmptyPool,
    MissingEmbedding { post_id: String, block: BlockTag },
    EmbeddingsNotLoaded(BlockTag),
}

impl fmt::Display for FeatureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureError::UnknownBlock(s) => write!(f, "unknown feature block {s:?} (expected f0..f4)"),
            FeatureError::EmptyFeatureSet => write!(f, "feature set is empty"),
            FeatureError::RaggedDimension { id, expected, found } => {
                write!(f, "embedding {id:?} has dimension {found}, expected {expected}")
            }
            FeatureError::DuplicateEmbedding(id) => write!(f, "duplicate embedding id {id:?}"),
            FeatureError::EmptyPool => write!(f, "cannot pool an empty set of vectors"),
            FeatureError::MissingEmbedding { post_id, block } => {
                write!(f, "post {post_id:?} has no embedding for block {block}")
            }
            FeatureError::EmbeddingsNotLoaded(b) => write!(f, "block {b} requires embeddings, none loaded"),
        }
    }
}

/// `[comment_count, node_count, undirected_edge_count, 2E/N]`.
pub fn f0_features(rec: &ThreadRecord, g: &InteractionGraph) -> [f64; 4] {
    let u = g.undirected_view();
    [
        rec.comment_count() as f64,
        u.node_count() as f64,
        u.edge_count() as f64,
        u.average_degree(),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingScope {
    Post,
    Comment,
}

/// Precomputed text embeddings keyed by post or comment id.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    pub scope: EmbeddingScope,
    dim: Option<usize>,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(scope: EmbeddingScope) -> Self {
        EmbeddingTable {
            scope,
            dim: None,
            vectors: BTreeMap::new(),
        }
    }

    /// Dimension, fixed by the first inserted vector.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, id: String, v: Vec<f64>) -> Result<(), FeatureError> {
        match self.dim {
            Some(d) if d != v.len() => {
                return Err(FeatureError::RaggedDimension {
                    id,
                    expected: d,
                    found: v.len(),
                })
            }
            None => self.dim = Some(v.len()),
            _ => {}
        }
        if self.vectors.contains_key(&id) {
            return Err(FeatureError::DuplicateEmbedding(id));
        }
        self.vectors.insert(id, v);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }
}

/// Elementwise mean of `post_vec` (unless `None`) and `comment_vecs`.
pub fn f2_pool(post_vec: Option<&[f64]>, comment_vecs: &[&[f64]]) -> Result<Vec<f64>, FeatureError> {
    let mut all = post_vec.into_iter().chain(comment_vecs.iter().copied());
    let first = all.next().ok_or(FeatureError::EmptyPool)?;
    let mut sum: Vec<f64> = first.to_vec();
    let mut count = 1usize;
    for v in all {
        if v.len() != sum.len() {
            return Err(FeatureError::RaggedDimension {
                id: String::from("<pool>"),
                expected: sum.len(),
                found: v.len(),
            });
        }
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        count += 1;
    }
    for s in &mut sum {
        *s /= count as f64;
    }
    Ok(sum)
}

/// Everything blocks need besides the record itself.
#[derive(Clone, Copy, Debug)]
pub struct FeatureContext<'a> {
    pub graph: GraphConfig,
    pub tda: TdaConfig,
    pub post_embeddings: Option<&'a EmbeddingTable>,
    pub comment_embeddings: Option<&'a EmbeddingTable>,
    /// Include the post vector in the f2 mean (otherwise comments only).
    pub pool_includes_post: bool,
}

impl<'a> FeatureContext<'a> {
    pub fn new(tda: TdaConfig) -> Self {
        FeatureContext {
            graph: GraphConfig::default(),
            tda,
            post_embeddings: None,
            comment_embeddings: None,
            pool_includes_post: true,
        }
    }

    pub fn embedding_dim(&self) -> Option<usize> {
        self.post_embeddings
            .and_then(EmbeddingTable::dim)
            .or_else(|| self.comment_embeddings.and_then(EmbeddingTable::dim))
    }

    /// Length of a block, `None` for embedding blocks with no loaded table.
    pub fn block_len(&self, tag: BlockTag) -> Option<usize> {
        match tag {
            BlockTag::F0 => Some(4),
            BlockTag::F1 | BlockTag::F2 => self.embedding_dim(),
            BlockTag::F3 => Some(MOTIF_CLASSES),
            BlockTag::F4 => Some(self.tda.f4_len()),
        }
    }
}

pub fn compute_block(
    tag: BlockTag,
    rec: &ThreadRecord,
    g: &InteractionGraph,
    ctx: &FeatureContext<'_>,
) -> Result<Vec<f64>, FeatureError> {
    let missing = || FeatureError::MissingEmbedding {
        post_id: rec.post_id.clone(),
        block: tag,
    };
    match tag {
        BlockTag::F0 => Ok(f0_features(rec, g).to_vec()),
        BlockTag::F1 => {
            let table = ctx.post_embeddings.ok_or(FeatureError::EmbeddingsNotLoaded(tag))?;
            table.get(&rec.post_id).map(<[f64]>::to_vec).ok_or_else(missing)
        }
        BlockTag::F2 => {
            let post = match ctx.post_embeddings {
                Some(t) if ctx.pool_includes_post => Some(t.get(&rec.post_id).ok_or_else(missing)?),
                None if ctx.pool_includes_post => return Err(FeatureError::EmbeddingsNotLoaded(tag)),
                _ => None,
            };
            let comments: Vec<&[f64]> = match ctx.comment_embeddings {
                Some(t) => rec.comments.iter().filter_map(|c| t.get(&c.comment_id)).collect(),
                None => Vec::new(),
            };
            f2_pool(post, &comments).map_err(|e| match e {
                FeatureError::EmptyPool => missing(),
                other => other,
            })
        }
        BlockTag::F3 => Ok(triad_census(g).as_f64().to_vec()),
        BlockTag::F4 => Ok(f4_vector(g, &ctx.tda)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub post_id: String,
    pub label: Label,
    pub blocks: Vec<(BlockTag, Vec<f64>)>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|(_, v)| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|(_, v)| v.iter().copied()).collect()
    }
}

/// Every block in `set` for one post; missing embeddings surface per block.
pub fn post_blocks(
    rec: &ThreadRecord,
    set: &FeatureSet,
    ctx: &FeatureContext<'_>,
) -> Vec<(BlockTag, Result<Vec<f64>, FeatureError>)> {
    let g = build_interaction_graph(rec, &ctx.graph);
    set.blocks()
        .iter()
        .map(|&t| (t, compute_block(t, rec, &g, ctx)))
        .collect()
}

/// Feature vector for one post, or the first block error.
pub fn feature_vector(
    rec: &ThreadRecord,
    label: Label,
    set: &FeatureSet,
    ctx: &FeatureContext<'_>,
) -> Result<FeatureVector, FeatureError> {
    let blocks = post_blocks(rec, set, ctx)
        .into_iter()
        .map(|(t, r)| r.map(|v| (t, v)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FeatureVector {
        post_id: rec.post_id.clone(),
        label,
        blocks,
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assembly {
    pub vectors: Vec<FeatureVector>,
    /// Labeled posts dropped for lacking a required embedding.
    pub missing_embeddings: usize,
}

/// One vector per labeled (non-excluded) post. Posts lacking an embedding
/// for a requested block are dropped and counted.
pub fn assemble<'r, I>(items: I, set: &FeatureSet, ctx: &FeatureContext<'_>) -> Result<Assembly, FeatureError>
where
    I: IntoIterator<Item = (&'r ThreadRecord, &'r Label)>,
{
    let mut out = Assembly::default();
    for (rec, label) in items {
        if !label.is_included() {
            continue;
        }
        match feature_vector(rec, *label, set, ctx) {
            Ok(v) => out.vectors.push(v),
            Err(FeatureError::MissingEmbedding { .. }) => out.missing_embeddings += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Column-wise z-scoring with statistics from training rows only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Population mean and standard deviation per column; constant columns
    /// keep scale 1.
    pub fn fit<'a, I>(rows: I, dim: usize) -> Self
    where
        I: IntoIterator<Item = &'a [f64]> + Clone,
    {
        let mut mean = alloc::vec![0.0; dim];
        let mut n = 0usize;
        for row in rows.clone() {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
            n += 1;
        }
        if n > 0 {
            for m in &mut mean {
                *m /= n as f64;
            }
        }
        let mut var = alloc::vec![0.0; dim];
        for row in rows {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|v| {
                let sd = if n > 0 { math::sqrt(v / n as f64) } else { 0.0 };
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}
