//! Pipeline stages. Every stage reads its inputs from and writes its outputs
//! under one workspace directory, next to a manifest naming the config,
//! seed, tool version and the hashes of everything read and written.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context as _;
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use topocontro_core::eval::{
    self, f1_per_class, plan_seed, CellKey, EvalReport, FeatureData, Metrics, TrainScenario,
};
use topocontro_core::features::{post_blocks, BlockTag, FeatureContext, FeatureError, FeatureSet, Standardizer};
use topocontro_core::graph::{build_comment_tree, build_interaction_graph, DistanceMode, GraphDiagnostics};
use topocontro_core::label::{dataset_summary, label_post, SummaryTable};
use topocontro_core::learn::{self, ModelKind, TrainedModel, TrainingConfig};
use topocontro_core::motifs::{triad_census, MOTIF_CLASSES};
use topocontro_core::tda::{domain_cap, eps_max_of, graph_diagram, ImageConfig, TdaConfig};
use topocontro_core::{synth, LabelValue, ThreadRecord};

use crate::config::RunConfig;
use crate::error::{require, CliResult};
use crate::jsonl::{parse_dump, write_jsonl, Embeddings, LineError};
use crate::manifest::Manifest;
use crate::report;
use crate::store::{read_json, write_json, Store, StoredPost};
use crate::table::{FeatureRow, FeatureTable};

/// Artifact locations under the `--out` directory.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workspace { root: root.into() }
    }

    pub fn dir(&self, stage: &str) -> PathBuf {
        self.root.join(stage)
    }

    pub fn synth_corpus(&self) -> PathBuf {
        self.dir("synth").join("corpus.jsonl")
    }

    pub fn synth_embeddings(&self) -> PathBuf {
        self.dir("synth").join("embeddings.jsonl")
    }

    pub fn store(&self) -> PathBuf {
        self.dir("store")
    }

    pub fn features(&self) -> PathBuf {
        self.dir("features").join("features.csv")
    }

    /// Feature sets the features stage was run for.
    pub fn feature_sets(&self) -> PathBuf {
        self.dir("features").join("sets.json")
    }

    pub fn results(&self) -> PathBuf {
        self.dir("eval").join("results.json")
    }

    pub fn report_csv(&self) -> PathBuf {
        self.dir("report").join("report.csv")
    }

    pub fn log_file(&self, command: &str) -> PathBuf {
        self.dir("logs").join(format!("{command}.jsonl"))
    }

    fn create(&self, stage: &str) -> anyhow::Result<PathBuf> {
        let d = self.dir(stage);
        std::fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
        Ok(d)
    }
}

pub struct Context {
    pub ws: Workspace,
    pub cfg: RunConfig,
    pool: rayon::ThreadPool,
}

impl Context {
    /// `jobs = None` uses every available core.
    pub fn new(ws: Workspace, cfg: RunConfig, jobs: Option<usize>) -> anyhow::Result<Self> {
        cfg.validate()?;
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = jobs {
            if j == 0 {
                anyhow::bail!("--jobs must be at least 1");
            }
            b = b.num_threads(j);
        }
        Ok(Context {
            ws,
            cfg,
            pool: b.build()?,
        })
    }

    /// Order-preserving parallel map on the context's pool.
    pub fn par_map<T: Sync, U: Send>(&self, items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    fn manifest(&self, command: &str) -> Manifest {
        Manifest::new(command, &self.cfg)
    }

    pub fn load_store(&self) -> CliResult<Store> {
        let dir = self.ws.store();
        require(&dir.join(crate::store::MANIFEST), "ingest")?;
        Ok(Store::read(&dir)?)
    }
}

// ---------------------------------------------------------------- synth

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthSummary {
    pub posts: usize,
    pub controversial: usize,
    pub mean_h1_controversial: f64,
    pub mean_h1_noncontroversial: f64,
}

pub fn synth(ctx: &Context) -> CliResult<SynthSummary> {
    let corpus = synth::generate(&ctx.cfg.synth, ctx.cfg.seed).map_err(|e| anyhow::anyhow!("synth: {e}"))?;
    let dir = ctx.ws.create("synth")?;
    let mut outputs = vec![ctx.ws.synth_corpus()];
    write_jsonl(&outputs[0], &corpus.records)?;
    if !corpus.embeddings.is_empty() {
        write_jsonl(&ctx.ws.synth_embeddings(), &corpus.embeddings)?;
        outputs.push(ctx.ws.synth_embeddings());
    }
    let summary = SynthSummary {
        posts: corpus.records.len(),
        controversial: corpus.controversial.iter().filter(|&&c| c).count(),
        mean_h1_controversial: corpus.mean_h1_controversial,
        mean_h1_noncontroversial: corpus.mean_h1_noncontroversial,
    };
    let summary_path = dir.join("summary.json");
    write_json(&summary_path, &summary)?;
    outputs.push(summary_path);
    ctx.manifest("synth").write(&dir, &outputs)?;
    info!(
        "synth: {} posts, {} controversial, mean H1 bars {:.3} (C) vs {:.3} (NC)",
        summary.posts, summary.controversial, summary.mean_h1_controversial, summary.mean_h1_noncontroversial
    );
    Ok(summary)
}

// ---------------------------------------------------------------- ingest

pub struct IngestOutcome {
    pub store: Store,
    pub errors: Vec<LineError>,
    pub summary: SummaryTable,
}

pub fn ingest(ctx: &Context, inputs: &[PathBuf], strict: bool) -> CliResult<IngestOutcome> {
    if inputs.is_empty() {
        return Err(anyhow::anyhow!("ingest needs at least one input file").into());
    }
    let mut by_id: BTreeMap<String, ThreadRecord> = BTreeMap::new();
    let mut errors = Vec::new();
    let mut manifest = ctx.manifest("ingest");
    for path in inputs {
        let dump = parse_dump(path)?;
        manifest = manifest.input(path)?;
        info!("{}: {} records, {} bad lines", path.display(), dump.records.len(), dump.errors.len());
        for e in &dump.errors {
            warn!("{}:{}: {}", e.file.display(), e.line, e.message);
        }
        errors.extend(dump.errors);
        for rec in dump.records {
            if let Some(prev) = by_id.insert(rec.post_id.clone(), rec) {
                warn!("duplicate post_id {:?}: keeping the later record", prev.post_id);
            }
        }
    }
    if strict && !errors.is_empty() {
        return Err(anyhow::anyhow!("{} malformed line(s) and --strict is set", errors.len()).into());
    }
    let records: Vec<ThreadRecord> = by_id.into_values().collect();
    let label_cfg = ctx.cfg.label;
    let posts = ctx.par_map(&records, |r| StoredPost {
        record: r.clone(),
        label: label_post(r, &label_cfg),
    });
    let store = Store::new(posts, label_cfg);
    let dir = ctx.ws.store();
    store.write(&dir)?;

    let summary = dataset_summary(store.posts.iter().map(|p| (&p.record, &p.label)));
    let errors_path = dir.join("parse_errors.jsonl");
    write_jsonl(&errors_path, &errors)?;
    let summary_json = dir.join("summary.json");
    write_json(&summary_json, &summary)?;
    let summary_md = dir.join("summary.md");
    std::fs::write(&summary_md, summary_markdown(&summary))?;
    let outputs = vec![
        dir.join(crate::store::MANIFEST),
        dir.join(crate::store::RECORDS),
        errors_path,
        summary_json,
        summary_md,
    ];
    manifest.arg(format!("strict={strict}")).write(&dir, &outputs)?;
    info!(
        "store: {} posts ({} C, {} NC, {} excluded), ratio {}",
        summary.total_posts,
        summary.controversial,
        summary.non_controversial,
        summary.excluded,
        summary.ratio_display()
    );
    Ok(IngestOutcome { store, errors, summary })
}

pub fn summary_markdown(s: &SummaryTable) -> String {
    let median = s.median_comments.map_or_else(|| "n/a".to_string(), |m| format!("{m}"));
    format!(
        "| Statistic | Value |\n|---|---:|\n\
         | Total posts | {} |\n\
         | Controversial (C) | {} |\n\
         | Non-controversial (NC) | {} |\n\
         | Excluded | {} |\n\
         | Excluded, UR outside both bands | {} |\n\
         | Excluded, too few comments | {} |\n\
         | Ratio of C to NC | {} |\n\
         | Comments on labeled posts | {} |\n\
         | Median comments per labeled post | {} |\n",
        s.total_posts,
        s.controversial,
        s.non_controversial,
        s.excluded,
        s.excluded_ur_gap,
        s.excluded_too_few_comments,
        s.ratio_display(),
        s.total_comments,
        median
    )
}

fn label_code(v: LabelValue) -> &'static str {
    match v {
        LabelValue::Controversial => "C",
        LabelValue::NonControversial => "NC",
        LabelValue::Excluded => "X",
    }
}

// ---------------------------------------------------------------- graphs

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub src: String,
    pub dst: String,
    pub weight: u64,
    pub timestamps: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    pub nodes: usize,
    pub max_depth: usize,
    pub max_branching: usize,
    pub mean_branching: f64,
    pub orphans: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRow {
    pub post_id: String,
    pub label: LabelValue,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeRow>,
    pub undirected_edges: usize,
    pub diagnostics: GraphDiagnostics,
    pub tree: TreeStats,
}

pub fn graphs(ctx: &Context) -> CliResult<Vec<GraphRow>> {
    let store = ctx.load_store()?;
    let gcfg = ctx.cfg.graph;
    let rows = ctx.par_map(&store.posts, |p| {
        let g = build_interaction_graph(&p.record, &gcfg);
        let t = build_comment_tree(&p.record);
        GraphRow {
            post_id: p.record.post_id.clone(),
            label: p.label.value,
            nodes: g.nodes().map(str::to_string).collect(),
            edges: g
                .edges()
                .map(|(s, d, ev)| EdgeRow {
                    src: s.to_string(),
                    dst: d.to_string(),
                    weight: ev.weight(),
                    timestamps: ev.timestamps().to_vec(),
                })
                .collect(),
            undirected_edges: g.undirected_view().edge_count(),
            diagnostics: g.diagnostics,
            tree: TreeStats {
                nodes: t.nodes.len(),
                max_depth: t.max_depth(),
                max_branching: t.max_branching(),
                mean_branching: t.mean_branching(),
                orphans: t.orphan_count,
            },
        }
    });
    let dir = ctx.ws.create("graphs")?;
    let out = dir.join("graphs.jsonl");
    write_jsonl(&out, &rows)?;
    let skipped = rows.iter().fold(GraphDiagnostics::default(), |mut acc, r| {
        acc.deleted_skipped += r.diagnostics.deleted_skipped;
        acc.self_replies_skipped += r.diagnostics.self_replies_skipped;
        acc.unresolved_parent_skipped += r.diagnostics.unresolved_parent_skipped;
        acc
    });
    info!(
        "graphs: {} posts; skipped {} deleted, {} self, {} unresolved replies",
        rows.len(),
        skipped.deleted_skipped,
        skipped.self_replies_skipped,
        skipped.unresolved_parent_skipped
    );
    ctx.manifest("graphs")
        .input(&ctx.ws.store().join(crate::store::RECORDS))?
        .write(&dir, &[out])?;
    Ok(rows)
}

// ---------------------------------------------------------------- tda

/// The image domain shared by every post of a store.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TdaDomain {
    pub metric: DistanceMode,
    pub resolution: usize,
    pub eps_max: Option<f64>,
    /// Upper bound of the birth and death axes.
    pub cap: f64,
    pub image: ImageConfig,
}

impl TdaDomain {
    pub fn tda_config(&self) -> TdaConfig {
        TdaConfig {
            metric: self.metric,
            eps_max: self.eps_max,
            image: self.image,
        }
    }
}

/// Cap = the configured `eps_max`, or the 99th percentile of per-post
/// largest finite distances over the whole store.
pub fn tda_domain(ctx: &Context, store: &Store) -> TdaDomain {
    let t = &ctx.cfg.tda;
    let cap = match t.eps_max {
        Some(e) if e > 0.0 => e,
        Some(_) => 1.0,
        None => {
            let gcfg = ctx.cfg.graph;
            let eps = ctx.par_map(&store.posts, |p| eps_max_of(&build_interaction_graph(&p.record, &gcfg), t.metric));
            domain_cap(&eps)
        }
    };
    let mut image = ImageConfig::with_cap(cap, t.resolution);
    image.essential = t.essential;
    TdaDomain {
        metric: t.metric,
        resolution: t.resolution,
        eps_max: t.eps_max,
        cap,
        image,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarRow {
    pub dim: u8,
    pub birth: f64,
    /// `None` for bars that never die.
    pub death: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramRow {
    pub post_id: String,
    pub label: LabelValue,
    pub h0: usize,
    pub h1: usize,
    pub bars: Vec<BarRow>,
}

pub fn tda(ctx: &Context) -> CliResult<TdaDomain> {
    let store = ctx.load_store()?;
    let domain = tda_domain(ctx, &store);
    let gcfg = ctx.cfg.graph;
    let rows = ctx.par_map(&store.posts, |p| {
        let g = build_interaction_graph(&p.record, &gcfg);
        let bars: Vec<BarRow> = graph_diagram(&g.undirected_view(), domain.metric, domain.eps_max)
            .map(|d| {
                d.bars
                    .iter()
                    .map(|b| BarRow {
                        dim: b.dim,
                        birth: b.birth,
                        death: b.death.is_finite().then_some(b.death),
                    })
                    .collect()
            })
            .unwrap_or_default();
        DiagramRow {
            post_id: p.record.post_id.clone(),
            label: p.label.value,
            h0: bars.iter().filter(|b| b.dim == 0).count(),
            h1: bars.iter().filter(|b| b.dim == 1).count(),
            bars,
        }
    });
    let dir = ctx.ws.create("tda")?;
    let diagrams = dir.join("diagrams.jsonl");
    write_jsonl(&diagrams, &rows)?;
    let domain_path = dir.join("domain.json");
    write_json(&domain_path, &domain)?;
    let mean_h1 = |v: LabelValue| {
        let h: Vec<f64> = rows.iter().filter(|r| r.label == v).map(|r| r.h1 as f64).collect();
        if h.is_empty() {
            0.0
        } else {
            h.iter().sum::<f64>() / h.len() as f64
        }
    };
    info!(
        "tda: {} diagrams, image cap {}, mean H1 bars {:.3} (C) vs {:.3} (NC)",
        rows.len(),
        domain.cap,
        mean_h1(LabelValue::Controversial),
        mean_h1(LabelValue::NonControversial)
    );
    ctx.manifest("tda")
        .input(&ctx.ws.store().join(crate::store::RECORDS))?
        .write(&dir, &[diagrams, domain_path])?;
    Ok(domain)
}

// ---------------------------------------------------------------- motifs

pub fn motifs(ctx: &Context) -> CliResult<PathBuf> {
    let store = ctx.load_store()?;
    let gcfg = ctx.cfg.graph;
    let census = ctx.par_map(&store.posts, |p| triad_census(&build_interaction_graph(&p.record, &gcfg)));
    let dir = ctx.ws.create("motifs")?;
    let out = dir.join("census.csv");
    let mut w = csv::Writer::from_path(&out)?;
    let mut header = vec!["post_id".to_string(), "label".to_string()];
    header.extend((1..=MOTIF_CLASSES).map(|k| format!("m{k}")));
    w.write_record(&header)?;
    for (p, c) in store.posts.iter().zip(&census) {
        let mut rec = vec![p.record.post_id.clone(), label_code(p.label.value).to_string()];
        rec.extend(c.counts.iter().map(u64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    info!("motifs: {} censuses", census.len());
    ctx.manifest("motifs")
        .input(&ctx.ws.store().join(crate::store::RECORDS))?
        .write(&dir, std::slice::from_ref(&out))?;
    Ok(out)
}

// ---------------------------------------------------------------- features

/// Embedding sources for f1/f2.
#[derive(Clone, Debug, Default)]
pub struct EmbeddingFiles {
    /// Rows carry their own `scope`.
    pub mixed: Option<PathBuf>,
    pub post: Option<PathBuf>,
    pub comment: Option<PathBuf>,
}

pub fn features(ctx: &Context, emb: &EmbeddingFiles) -> CliResult<FeatureTable> {
    let store = ctx.load_store()?;
    let sets = ctx.cfg.features.parsed_sets()?;
    let union = sets.iter().skip(1).fold(sets[0].clone(), |acc, s| acc.union(s));

    let mut embeddings = Embeddings::default();
    let mut manifest = ctx.manifest("features").input(&ctx.ws.store().join(crate::store::RECORDS))?;
    let mixed = emb.mixed.clone().or_else(|| ctx.cfg.features.embeddings.clone());
    for (path, scope) in [
        (mixed.as_ref(), None),
        (emb.post.as_ref(), Some(topocontro_core::features::EmbeddingScope::Post)),
        (emb.comment.as_ref(), Some(topocontro_core::features::EmbeddingScope::Comment)),
    ] {
        if let Some(p) = path {
            embeddings.load(p, scope)?;
            manifest = manifest.input(p)?;
        }
    }
    let have_embeddings = !embeddings.posts.is_empty() || !embeddings.comments.is_empty();
    if union.needs_embeddings() && !have_embeddings {
        return Err(anyhow::anyhow!(
            "feature set(s) {} need text embeddings: pass --embeddings (or --post-emb/--comment-emb)",
            sets.iter().filter(|s| s.needs_embeddings()).map(ToString::to_string).collect::<Vec<_>>().join(", ")
        )
        .into());
    }

    let domain = tda_domain(ctx, &store);
    let mut fctx = FeatureContext::new(domain.tda_config());
    fctx.graph = ctx.cfg.graph;
    fctx.pool_includes_post = ctx.cfg.features.pool_includes_post;
    if have_embeddings {
        fctx.post_embeddings = Some(&embeddings.posts);
        fctx.comment_embeddings = Some(&embeddings.comments);
    }
    let mut columns = Vec::new();
    let mut widths = Vec::new();
    for &tag in union.blocks() {
        let w = fctx
            .block_len(tag)
            .with_context(|| format!("block {tag} has no embeddings loaded"))?;
        columns.extend((0..w).map(|i| (tag, i)));
        widths.push((tag, w));
    }

    let included: Vec<&StoredPost> = store.posts.iter().filter(|p| p.label.is_included()).collect();
    let rows = ctx.par_map(&included, |p| -> Result<(FeatureRow, Vec<BlockTag>), FeatureError> {
        let mut values = Vec::with_capacity(columns.len());
        let mut missing = Vec::new();
        for ((tag, res), &(_, w)) in post_blocks(&p.record, &union, &fctx).into_iter().zip(&widths) {
            match res {
                Ok(v) => values.extend(v.into_iter().map(Some)),
                Err(FeatureError::MissingEmbedding { .. }) => {
                    missing.push(tag);
                    values.extend(std::iter::repeat_n(None, w));
                }
                Err(e) => return Err(e),
            }
        }
        Ok((
            FeatureRow {
                post_id: p.record.post_id.clone(),
                controversial: p.label.as_binary().expect("included"),
                values,
            },
            missing,
        ))
    });
    let mut table = FeatureTable {
        columns,
        rows: Vec::with_capacity(rows.len()),
    };
    let mut missing_by_block: BTreeMap<BlockTag, usize> = BTreeMap::new();
    for r in rows {
        let (row, missing) = r.map_err(|e| anyhow::anyhow!("features: {e}"))?;
        if row.values.len() != table.columns.len() {
            return Err(anyhow::anyhow!("post {:?}: block lengths differ from the header", row.post_id).into());
        }
        for t in missing {
            *missing_by_block.entry(t).or_default() += 1;
        }
        table.rows.push(row);
    }
    for (t, n) in &missing_by_block {
        warn!("{n} post(s) lack embeddings for {t}; sets using {t} drop them");
    }

    let dir = ctx.ws.create("features")?;
    let out = ctx.ws.features();
    table.write(&out)?;
    let domain_path = dir.join("domain.json");
    write_json(&domain_path, &domain)?;
    let sets_path = ctx.ws.feature_sets();
    write_json(&sets_path, &sets.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    info!(
        "features: {} posts x {} columns ({}), image cap {}",
        table.rows.len(),
        table.columns.len(),
        union,
        domain.cap
    );
    manifest
        .arg(format!("sets={}", ctx.cfg.features.sets.join(",")))
        .write(&dir, &[out, domain_path, sets_path])?;
    Ok(table)
}

fn load_features(ctx: &Context) -> CliResult<FeatureTable> {
    let path = ctx.ws.features();
    require(&path, "features")?;
    Ok(FeatureTable::read(&path)?)
}

// ---------------------------------------------------------------- train

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub scenario: TrainScenario,
    pub features: String,
    pub columns: Vec<String>,
    pub standardizer: Standardizer,
    pub training: TrainingConfig,
    pub grid_holdout_f1: Option<f64>,
    pub test_balanced: Metrics,
    pub test_natural: Metrics,
    pub model: TrainedModel,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

pub fn train(ctx: &Context, kind: ModelKind, set: &FeatureSet, scenario: TrainScenario, grid: bool) -> CliResult<PathBuf> {
    let table = load_features(ctx)?;
    let m = table.matrix_for(set)?;
    if m.dropped > 0 {
        warn!("{set}: {} post(s) dropped for missing values", m.dropped);
    }
    let seed = ctx.cfg.seed;
    let split = &ctx.cfg.eval.split;
    let plan = plan_seed(&m.labels, scenario, split, seed).map_err(|e| anyhow::anyhow!("{e}"))?;
    let scaler = Standardizer::fit(plan.train.iter().map(|&i| m.x.row(i)), m.x.cols());
    let xs = m.x.map_rows(|r| scaler.transform_row(r));
    let xt = xs.select(&plan.resampled_train);
    let yt: Vec<bool> = plan.resampled_train.iter().map(|&i| m.labels[i]).collect();
    let (training, holdout) = if grid {
        let (cfg, f) = eval::grid_search(kind, &xt, &yt, &ctx.cfg.train, seed).map_err(|e| anyhow::anyhow!("{e}"))?;
        info!("grid search: best holdout F1(C) {f:.4}");
        (cfg, Some(f))
    } else {
        (ctx.cfg.train.clone(), None)
    };
    let model = learn::train(kind, &xt, &yt, &training, eval::model_seed(seed, kind)).map_err(|e| anyhow::anyhow!("{e}"))?;
    let score = |idx: &[usize]| -> anyhow::Result<Metrics> {
        let pred = model.predict(&xs.select(idx)).map_err(|e| anyhow::anyhow!("{e}"))?;
        let truth: Vec<bool> = idx.iter().map(|&i| m.labels[i]).collect();
        f1_per_class(&truth, &pred.labels).map_err(|e| anyhow::anyhow!("{e}"))
    };
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        scenario,
        features: set.to_string(),
        columns: m.column_names.clone(),
        standardizer: scaler,
        training,
        grid_holdout_f1: holdout,
        test_balanced: score(&plan.test_balanced)?,
        test_natural: score(&plan.test)?,
        model,
    };
    let dir = ctx.ws.create("models")?;
    let out = dir.join(format!("{scenario}_{kind}_{set}.json"));
    write_json(&out, &file)?;
    info!(
        "{}: Fc(a) {:.4}, Fc(c) {:.4}",
        out.display(),
        file.test_balanced.f1_controversial,
        file.test_natural.f1_controversial
    );
    ctx.manifest(&format!("train_{scenario}_{kind}_{set}"))
        .arg(format!("model={kind}"))
        .arg(format!("features={set}"))
        .arg(format!("scenario={scenario}"))
        .arg(format!("grid={grid}"))
        .input(&ctx.ws.features())?
        .write(&dir, std::slice::from_ref(&out))?;
    Ok(out)
}

// ---------------------------------------------------------------- evaluate

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetInfo {
    pub features: String,
    pub posts: usize,
    pub controversial: usize,
    pub dropped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Results {
    pub seeds: Vec<u64>,
    pub sets: Vec<SetInfo>,
    pub report: EvalReport,
}

pub fn evaluate(ctx: &Context) -> CliResult<Results> {
    let table = load_features(ctx)?;
    let sets = ctx.cfg.features.parsed_sets()?;
    let mut data = Vec::new();
    let mut infos = Vec::new();
    for set in &sets {
        let m = table.matrix_for(set)?;
        if m.dropped > 0 {
            warn!("{set}: {} post(s) dropped for missing values", m.dropped);
        }
        infos.push(SetInfo {
            features: set.to_string(),
            posts: m.labels.len(),
            controversial: m.labels.iter().filter(|&&c| c).count(),
            dropped: m.dropped,
        });
        data.push(FeatureData {
            name: set.to_string(),
            x: m.x,
            labels: m.labels,
        });
    }
    let e = &ctx.cfg.eval;
    let seeds = e.seed_list(ctx.cfg.seed);
    let mut cells = Vec::new();
    for &scenario in &e.scenarios {
        for &model in &e.models {
            for (di, d) in data.iter().enumerate() {
                cells.push((
                    CellKey {
                        scenario,
                        model,
                        features: d.name.clone(),
                    },
                    di,
                ));
            }
        }
    }
    let jobs: Vec<(usize, u64)> = (0..cells.len()).flat_map(|c| seeds.iter().map(move |&s| (c, s))).collect();
    let training = &ctx.cfg.train;
    let runs = ctx.par_map(&jobs, |&(c, s)| {
        let (key, di) = &cells[c];
        let d = &data[*di];
        eval::evaluate_seed(&d.x, &d.labels, key.scenario, key.model, training, &e.split, s)
    });
    let mut runs = runs.into_iter();
    let report = EvalReport {
        cells: cells
            .into_iter()
            .map(|(key, _)| eval::aggregate(key, runs.by_ref().take(seeds.len()).collect()))
            .collect(),
    };
    for c in &report.cells {
        match &c.outcome {
            Ok(s) => info!(
                "({}) {} {}: Fc(a) {:.4}, Fc(c) {:.4}, I {:.3}",
                c.key.scenario, c.key.model, c.key.features, s.fc_a.mean, s.fc_c.mean, s.impact.mean
            ),
            Err(msg) => warn!("({}) {} {}: {msg}", c.key.scenario, c.key.model, c.key.features),
        }
    }
    let results = Results {
        seeds,
        sets: infos,
        report,
    };
    let dir = ctx.ws.create("eval")?;
    let out = ctx.ws.results();
    write_json(&out, &results)?;
    ctx.manifest("evaluate").input(&ctx.ws.features())?.write(&dir, &[out])?;
    Ok(results)
}

// ---------------------------------------------------------------- report

pub fn report(ctx: &Context) -> CliResult<PathBuf> {
    let path = ctx.ws.results();
    require(&path, "evaluate")?;
    let results: Results = read_json(&path)?;
    let dir = ctx.ws.create("report")?;
    let csv_path = ctx.ws.report_csv();
    report::write_csv(&results.report, &csv_path)?;
    let mut md = String::from("# Results\n\n");
    md.push_str(&format!(
        "Mean ± standard deviation over seeds {:?}. Fc(a): controversial-class F1 on the balanced test set; \
         Fc(c): on the natural test set; I: imbalance impact score.\n\n",
        results.seeds
    ));
    md.push_str(&report::markdown(&results.report));
    md.push_str("\n## Feature sets\n\n| Features | Posts | Controversial | Dropped |\n|---|---:|---:|---:|\n");
    for s in &results.sets {
        md.push_str(&format!("| {} | {} | {} | {} |\n", s.features, s.posts, s.controversial, s.dropped));
    }
    let mut outputs = vec![csv_path.clone()];
    let mut manifest = ctx.manifest("report").input(&path)?;
    if ctx.ws.store().join(crate::store::MANIFEST).exists() {
        let store = Store::read(&ctx.ws.store())?;
        let summary = dataset_summary(store.posts.iter().map(|p| (&p.record, &p.label)));
        md.push_str("\n## Dataset\n\n");
        md.push_str(&summary_markdown(&summary));
        let points: Vec<(f64, LabelValue)> = store.posts.iter().map(|p| (p.record.upvote_ratio, p.label.value)).collect();
        let svg = dir.join("ur_density.svg");
        std::fs::write(&svg, report::ur_density_svg(&points, &store.manifest.label_config))?;
        md.push_str("\n![Upvote ratio densities](ur_density.svg)\n");
        outputs.push(svg);
        manifest = manifest.input(&ctx.ws.store().join(crate::store::RECORDS))?;
    }
    let md_path = dir.join("report.md");
    std::fs::write(&md_path, md)?;
    outputs.push(md_path);
    manifest.write(&dir, &outputs)?;
    info!("report: {}", csv_path.display());
    Ok(csv_path)
}
