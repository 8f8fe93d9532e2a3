//! Seeded synthetic thread corpus with a planted structural signal.
//!
//! Controversial posts draw UR from [0.30, 0.70] and contain a reply ring of
//! four to six users, which shows up as an H1 bar of the interaction graph.
//! Non-controversial posts draw UR from [0.80, 1.00]; their reply structure
//! is a user tree plus sibling closures, which add edges without adding
//! loops. A fraction of posts of either label gets the other label's
//! structure, so the signal is strong but not perfect. Both labels share the
//! same user-count and comment-count distributions.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::graph::{build_interaction_graph, DistanceMode, GraphConfig};
use crate::math;
use crate::record::{CommentRecord, ThreadRecord, DELETED_AUTHOR};
use crate::rng::{self, Rng};
use crate::tda::graph_diagram;

const SUBREDDITS: [&str; 6] = ["politics", "PoliticalDiscussion", "Conservative", "Liberal", "news", "worldnews"];
const WORDS: [&str; 24] = [
    "policy", "vote", "senate", "bill", "tax", "court", "election", "debate", "reform", "campaign", "budget", "poll",
    "governor", "law", "rights", "economy", "border", "healthcare", "climate", "ruling", "party", "speech", "district",
    "ballot",
];
const USER_POOL: usize = 5000;
const BASE_TIME: i64 = 1_696_118_400;
const MAX_ATTEMPTS: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub n_posts: usize,
    pub controversial_frac: f64,
    /// Users per thread besides the post author, inclusive range.
    pub min_users: usize,
    pub max_users: usize,
    /// Extra comments beyond the structural replies, inclusive range.
    pub min_extra_comments: usize,
    pub max_extra_comments: usize,
    /// Probability that a post gets the other label's reply structure.
    pub structure_noise: f64,
    /// Probability that a filler comment comes from a deleted account.
    pub deleted_rate: f64,
    /// Length of the synthetic embedding vectors; 0 disables them.
    pub embedding_dim: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_posts: 2000,
            controversial_frac: 0.129,
            min_users: 6,
            max_users: 16,
            min_extra_comments: 4,
            max_extra_comments: 30,
            structure_noise: 0.1,
            deleted_rate: 0.03,
            embedding_dim: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SynthError {
    FractionOutOfRange(f64),
    InvalidConfig(&'static str),
    /// The planted H1 signal did not materialize.
    SignalMissing { controversial_h1: f64, noncontroversial_h1: f64 },
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::FractionOutOfRange(v) => write!(f, "controversial_frac {v} must lie strictly between 0 and 1"),
            SynthError::InvalidConfig(msg) => write!(f, "invalid synthetic config: {msg}"),
            SynthError::SignalMissing {
                controversial_h1,
                noncontroversial_h1,
            } => write!(
                f,
                "planted signal missing: mean H1 bars {controversial_h1:.3} (controversial) vs {noncontroversial_h1:.3}"
            ),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.controversial_frac > 0.0 && self.controversial_frac < 1.0) {
            return Err(SynthError::FractionOutOfRange(self.controversial_frac));
        }
        if self.min_users < 6 || self.max_users < self.min_users {
            return Err(SynthError::InvalidConfig("need 6 <= min_users <= max_users"));
        }
        if self.max_extra_comments < self.min_extra_comments {
            return Err(SynthError::InvalidConfig("min_extra_comments exceeds max_extra_comments"));
        }
        for p in [self.structure_noise, self.deleted_rate] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::InvalidConfig("probabilities must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Exact number of controversial posts generated.
    pub fn controversial_count(&self) -> usize {
        math::round(self.n_posts as f64 * self.controversial_frac) as usize
    }
}

/// A synthetic embedding row; `scope` is `"post"` or `"comment"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthEmbedding {
    pub scope: String,
    pub id: String,
    pub vector: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SynthCorpus {
    pub records: Vec<ThreadRecord>,
    /// Which posts were generated as controversial, parallel to `records`.
    pub controversial: Vec<bool>,
    pub embeddings: Vec<SynthEmbedding>,
    pub mean_h1_controversial: f64,
    pub mean_h1_noncontroversial: f64,
}

pub fn generate(cfg: &SynthConfig, seed: u64) -> Result<SynthCorpus, SynthError> {
    cfg.validate()?;
    let n_c = cfg.controversial_count();
    let mut label_rng = rng::rng_for(seed, &[rng::key("labels")]);
    let mut controversial = alloc::vec![false; cfg.n_posts];
    for i in index::sample(&mut label_rng, cfg.n_posts, n_c.min(cfg.n_posts)) {
        controversial[i] = true;
    }

    let mut corpus = SynthCorpus::default();
    let (mut h1c, mut h1n) = (0usize, 0usize);
    for (i, &c) in controversial.iter().enumerate() {
        let mut r = rng::rng_for(seed, &[rng::key("post"), i as u64]);
        let (rec, h1) = post(cfg, i, c, &mut r);
        if c {
            h1c += h1;
        } else {
            h1n += h1;
        }
        if cfg.embedding_dim > 0 {
            embed(&rec, c, cfg.embedding_dim, &mut r, &mut corpus.embeddings);
        }
        corpus.records.push(rec);
    }
    let n_n = cfg.n_posts - n_c;
    corpus.mean_h1_controversial = if n_c > 0 { h1c as f64 / n_c as f64 } else { 0.0 };
    corpus.mean_h1_noncontroversial = if n_n > 0 { h1n as f64 / n_n as f64 } else { 0.0 };
    if n_c > 0 && n_n > 0 && corpus.mean_h1_controversial <= corpus.mean_h1_noncontroversial {
        return Err(SynthError::SignalMissing {
            controversial_h1: corpus.mean_h1_controversial,
            noncontroversial_h1: corpus.mean_h1_noncontroversial,
        });
    }
    corpus.controversial = controversial;
    Ok(corpus)
}

fn words(r: &mut Rng, lo: usize, hi: usize) -> String {
    let n = r.gen_range(lo..hi);
    let picked: Vec<&str> = (0..n).map(|_| *WORDS.choose(r).unwrap()).collect();
    picked.join(" ")
}

fn h1_count(rec: &ThreadRecord) -> usize {
    let g = build_interaction_graph(rec, &GraphConfig::default());
    graph_diagram(&g.undirected_view(), DistanceMode::Hop, None).map_or(0, |d| d.count(1))
}

/// One post; returns it with its H1 bar count.
fn post(cfg: &SynthConfig, index: usize, controversial: bool, r: &mut Rng) -> (ThreadRecord, usize) {
    let ring = controversial != r.gen_bool(cfg.structure_noise);
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let rec = thread(cfg, index, controversial, ring, r);
        let h1 = h1_count(&rec);
        // Rings can be coned off by a shared neighbor; redraw until one survives.
        if !ring || h1 > 0 {
            return (rec, h1);
        }
        last = Some((rec, h1));
    }
    last.unwrap()
}

fn thread(cfg: &SynthConfig, index: usize, controversial: bool, ring: bool, r: &mut Rng) -> ThreadRecord {
    let n = r.gen_range(cfg.min_users..=cfg.max_users);
    let users: Vec<String> = index::sample(r, USER_POOL, n + 1)
        .into_iter()
        .map(|u| format!("user{u:04}"))
        .collect();

    // User tree: user i replies under some earlier user, often the author.
    let mut parent = alloc::vec![0usize; n + 1];
    for (i, p) in parent.iter_mut().enumerate().skip(1) {
        *p = if r.gen_bool(0.35) { 0 } else { r.gen_range(0..i) };
    }
    let mut adjacent = BTreeSet::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let link = |a: usize, b: usize, adjacent: &mut BTreeSet<(usize, usize)>, pairs: &mut Vec<(usize, usize)>| {
        adjacent.insert((a.min(b), a.max(b)));
        pairs.push((a, b));
    };
    for (i, &p) in parent.iter().enumerate().skip(1) {
        link(i, p, &mut adjacent, &mut pairs);
    }

    if ring {
        let size = r.gen_range(4..=6usize).min(n);
        let mut members: Vec<usize> = (1..=n).collect();
        let mut best: Vec<usize> = Vec::new();
        for _ in 0..MAX_ATTEMPTS {
            members.shuffle(r);
            let cand = &members[..size];
            let clean = (0..size).all(|k| {
                let (a, b) = (cand[k], cand[(k + 1) % size]);
                !adjacent.contains(&(a.min(b), a.max(b)))
            });
            best = cand.to_vec();
            if clean {
                break;
            }
        }
        for k in 0..size {
            link(best[k], best[(k + 1) % size], &mut adjacent, &mut pairs);
        }
    } else {
        let closures = r.gen_range(3..=6usize);
        let mut children: Vec<Vec<usize>> = alloc::vec![Vec::new(); n + 1];
        for i in 1..=n {
            children[parent[i]].push(i);
        }
        for _ in 0..closures * 4 {
            if pairs.len() >= n + closures {
                break;
            }
            let p = r.gen_range(0..=n);
            if children[p].len() < 2 {
                continue;
            }
            let pick = index::sample(r, children[p].len(), 2);
            let (a, b) = (children[p][pick.index(0)], children[p][pick.index(1)]);
            if adjacent.contains(&(a.min(b), a.max(b))) {
                continue;
            }
            link(a, b, &mut adjacent, &mut pairs);
        }
    }

    let post_id = format!("p{index:06}");
    let created = BASE_TIME + index as i64 * 977;
    let mut comments: Vec<CommentRecord> = Vec::new();
    let mut by_user: Vec<Vec<usize>> = alloc::vec![Vec::new(); n + 1];
    let mut clock = created;

    let mut emit = |author: Option<usize>, target: Option<usize>, r: &mut Rng, comments: &mut Vec<CommentRecord>| {
        // `target == Some(0)` with no comment by the author replies to the post.
        let parent_id = match target {
            Some(t) if !by_user[t].is_empty() && (t != 0 || r.gen_bool(0.3)) => {
                let c = *by_user[t].choose(r).unwrap();
                format!("t1_{}", comments[c].comment_id)
            }
            Some(_) => format!("t3_{post_id}"),
            None if !comments.is_empty() && r.gen_bool(0.7) => {
                format!("t1_{}", comments[r.gen_range(0..comments.len())].comment_id)
            }
            None => format!("t3_{post_id}"),
        };
        clock += r.gen_range(5..600);
        let id = format!("{post_id}c{:03}", comments.len());
        comments.push(CommentRecord {
            comment_id: id,
            parent_id,
            author: author.map_or_else(|| DELETED_AUTHOR.to_string(), |a| users[a].clone()),
            body: words(r, 3, 12),
            created_utc: clock,
        });
        if let Some(a) = author {
            by_user[a].push(comments.len() - 1);
        }
    };

    for &(a, b) in &pairs {
        emit(Some(a), Some(b), r, &mut comments);
    }
    let extra = r.gen_range(cfg.min_extra_comments..=cfg.max_extra_comments);
    for _ in 0..extra {
        if r.gen_bool(cfg.deleted_rate) {
            emit(None, None, r, &mut comments);
            continue;
        }
        let (a, b) = *pairs.choose(r).unwrap();
        // Back-and-forth on existing links only, so structure stays planted.
        if r.gen_bool(0.4) {
            emit(Some(b), Some(a), r, &mut comments);
        } else {
            emit(Some(a), Some(b), r, &mut comments);
        }
    }

    let ur = if controversial {
        r.gen_range(0.30..=0.70)
    } else {
        r.gen_range(0.80..=1.00)
    };
    let ur = math::round(ur * 1000.0) / 1000.0;
    ThreadRecord {
        post_id,
        subreddit: SUBREDDITS.choose(r).unwrap().to_string(),
        title: words(r, 4, 10),
        selftext: words(r, 0, 20),
        author: users[0].clone(),
        created_utc: created,
        upvote_ratio: ur,
        comments,
    }
}

/// Gaussian-ish vectors with a small mean shift on the first coordinate for
/// controversial posts.
fn embed(rec: &ThreadRecord, controversial: bool, dim: usize, r: &mut Rng, out: &mut Vec<SynthEmbedding>) {
    let shift = if controversial { 0.5 } else { 0.0 };
    let vector = |r: &mut Rng| -> Vec<f64> {
        (0..dim)
            .map(|k| {
                // Sum of uniforms: cheap bell shape, variance 1.
                let z: f64 = (0..3).map(|_| r.gen_range(-1.0..1.0)).sum();
                z + if k == 0 { shift } else { 0.0 }
            })
            .collect()
    };
    out.push(SynthEmbedding {
        scope: "post".into(),
        id: rec.post_id.clone(),
        vector: vector(r),
    });
    for c in &rec.comments {
        out.push(SynthEmbedding {
            scope: "comment".into(),
            id: c.comment_id.clone(),
            vector: vector(r),
        });
    }
}
