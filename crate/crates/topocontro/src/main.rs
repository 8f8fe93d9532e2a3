use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;
use topocontro::config::RunConfig;
use topocontro::error::{CliError, CliResult};
use topocontro::logging;
use topocontro::store::read_json;
use topocontro::pipeline::{self, Context, EmbeddingFiles, Workspace};
use topocontro_core::eval::TrainScenario;
use topocontro_core::features::FeatureSet;
use topocontro_core::graph::DistanceMode;
use topocontro_core::learn::ModelKind;

/// Controversy detection on discussion threads from reply-graph topology.
#[derive(Parser, Debug)]
#[command(name = "topocontro", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Workspace directory holding every stage's artifacts.
    #[arg(long, global = true, default_value = "topocontro-out")]
    out: PathBuf,
    /// Only warnings and errors on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic corpus with planted reply cycles.
    Synth {
        #[arg(long)]
        n_posts: Option<usize>,
        #[arg(long)]
        controversial_frac: Option<f64>,
        /// Also write random embeddings of this dimension.
        #[arg(long)]
        embedding_dim: Option<usize>,
    },
    /// Parse thread dumps, label posts and write the post store.
    Ingest {
        /// JSONL thread dumps; later files win on duplicate post ids.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        min_comments: Option<usize>,
        /// Fail on any malformed line.
        #[arg(long)]
        strict: bool,
    },
    /// Build user interaction graphs and comment trees.
    Graphs,
    /// Persistence diagrams of every post's interaction graph.
    Tda {
        #[arg(long, value_parser = parse_metric)]
        metric: Option<DistanceMode>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Triad census of every post's interaction graph.
    Motifs,
    /// Assemble the feature matrix.
    Features(FeatureArgs),
    /// Train and save one model.
    Train {
        #[arg(long, value_parser = parse_model)]
        model: ModelKind,
        /// Feature set, e.g. f0+f3+f4.
        #[arg(long, value_parser = parse_set)]
        features: FeatureSet,
        #[arg(long, default_value = "C")]
        scenario: TrainScenario,
        /// Pick hyperparameters by grid search on a holdout of the training split.
        #[arg(long)]
        grid: bool,
    },
    /// Run the scenario x model x feature-set matrix over all seeds.
    Evaluate {
        /// Comma-separated feature sets (default: those given to `features`).
        #[arg(long, value_delimiter = ',')]
        sets: Option<Vec<String>>,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Render evaluation results as CSV, markdown and a density plot.
    Report,
    /// ingest, features, evaluate and report in one go.
    Run {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        min_comments: Option<usize>,
        #[command(flatten)]
        features: FeatureArgs,
        #[command(flatten)]
        eval: EvalArgs,
    },
}

#[derive(Args, Debug)]
struct FeatureArgs {
    /// Comma-separated feature sets, e.g. f0,f0+f3+f4.
    #[arg(long, value_delimiter = ',')]
    sets: Option<Vec<String>>,
    /// JSONL embeddings with a scope field per row.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// JSONL post embeddings.
    #[arg(long)]
    post_emb: Option<PathBuf>,
    /// JSONL comment embeddings.
    #[arg(long)]
    comment_emb: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Comma-separated models.
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    models: Option<Vec<ModelKind>>,
    /// Comma-separated training scenarios (A, B, C).
    #[arg(long, value_delimiter = ',')]
    scenarios: Option<Vec<TrainScenario>>,
    /// Number of seeds.
    #[arg(long)]
    seeds: Option<usize>,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_set(s: &str) -> Result<FeatureSet, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_metric(s: &str) -> Result<DistanceMode, String> {
    match s {
        "hop" => Ok(DistanceMode::Hop),
        "invweight" => Ok(DistanceMode::InverseWeight),
        _ => Err(format!("unknown metric {s:?} (hop or invweight)")),
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth { .. } => "synth",
            Command::Ingest { .. } => "ingest",
            Command::Graphs => "graphs",
            Command::Tda { .. } => "tda",
            Command::Motifs => "motifs",
            Command::Features(_) => "features",
            Command::Train { .. } => "train",
            Command::Evaluate { .. } => "evaluate",
            Command::Report => "report",
            Command::Run { .. } => "run",
        }
    }
}

impl FeatureArgs {
    fn apply(&self, cfg: &mut RunConfig) -> EmbeddingFiles {
        if let Some(s) = &self.sets {
            cfg.features.sets = s.clone();
        }
        if let Some(e) = &self.embeddings {
            cfg.features.embeddings = Some(e.clone());
        }
        EmbeddingFiles {
            mixed: None,
            post: self.post_emb.clone(),
            comment: self.comment_emb.clone(),
        }
    }
}

impl EvalArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(m) = &self.models {
            cfg.eval.models = m.clone();
        }
        if let Some(s) = &self.scenarios {
            cfg.eval.scenarios = s.clone();
        }
        if let Some(n) = self.seeds {
            cfg.eval.seeds = n;
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.common.config.as_deref())?;
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    let mut emb = EmbeddingFiles::default();
    match &cli.command {
        Command::Synth {
            n_posts,
            controversial_frac,
            embedding_dim,
        } => {
            if let Some(n) = n_posts {
                cfg.synth.n_posts = *n;
            }
            if let Some(f) = controversial_frac {
                cfg.synth.controversial_frac = *f;
            }
            if let Some(d) = embedding_dim {
                cfg.synth.embedding_dim = *d;
            }
        }
        Command::Ingest { min_comments, .. } => {
            if let Some(m) = min_comments {
                cfg.label.min_comments = *m;
            }
        }
        Command::Tda { metric, resolution } => {
            if let Some(m) = metric {
                cfg.tda.metric = *m;
            }
            if let Some(r) = resolution {
                cfg.tda.resolution = *r;
            }
        }
        Command::Features(f) => emb = f.apply(&mut cfg),
        Command::Evaluate { sets, eval } => {
            eval.apply(&mut cfg);
            match sets {
                Some(s) => cfg.features.sets = s.clone(),
                None => {
                    let recorded = Workspace::new(&cli.common.out).feature_sets();
                    if recorded.exists() {
                        cfg.features.sets = read_json(&recorded)?;
                    }
                }
            }
        }
        Command::Run {
            min_comments,
            features,
            eval,
            ..
        } => {
            if let Some(m) = min_comments {
                cfg.label.min_comments = *m;
            }
            emb = features.apply(&mut cfg);
            eval.apply(&mut cfg);
        }
        Command::Graphs | Command::Motifs | Command::Train { .. } | Command::Report => {}
    }

    let ws = Workspace::new(&cli.common.out);
    let level = if cli.common.quiet { LevelFilter::Warn } else { LevelFilter::Info };
    logging::init(level, Some(&ws.log_file(cli.command.name())));
    let ctx = Context::new(ws, cfg, cli.common.jobs)?;

    match cli.command {
        Command::Synth { .. } => {
            pipeline::synth(&ctx)?;
        }
        Command::Ingest { inputs, strict, .. } => {
            pipeline::ingest(&ctx, &inputs, strict)?;
        }
        Command::Graphs => {
            pipeline::graphs(&ctx)?;
        }
        Command::Tda { .. } => {
            pipeline::tda(&ctx)?;
        }
        Command::Motifs => {
            pipeline::motifs(&ctx)?;
        }
        Command::Features(_) => {
            pipeline::features(&ctx, &emb)?;
        }
        Command::Train {
            model,
            features,
            scenario,
            grid,
        } => {
            pipeline::train(&ctx, model, &features, scenario, grid)?;
        }
        Command::Evaluate { .. } => {
            pipeline::evaluate(&ctx)?;
        }
        Command::Report => {
            pipeline::report(&ctx)?;
        }
        Command::Run { inputs, .. } => {
            pipeline::ingest(&ctx, &inputs, false)?;
            pipeline::features(&ctx, &emb)?;
            pipeline::evaluate(&ctx)?;
            pipeline::report(&ctx)?;
        }
    }
    log::logger().flush();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> ExitCode {
    log::logger().flush();
    let summary = e.summary();
    eprintln!("error: {}", summary.message);
    eprintln!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    ExitCode::from(e.exit_code() as u8)
}
