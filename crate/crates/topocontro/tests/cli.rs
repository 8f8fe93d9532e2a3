use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topocontro"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).arg("--quiet").output().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_on_every_subcommand() {
    let o = bin().arg("--help").output().unwrap();
    assert!(o.status.success());
    for sub in ["synth", "ingest", "graphs", "tda", "motifs", "features", "train", "evaluate", "report", "run"] {
        let o = bin().args([sub, "--help"]).output().unwrap();
        assert!(o.status.success(), "{sub} --help failed");
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(text.contains("Usage: topocontro"), "{sub}: {text}");
        assert!(text.contains("--out"), "{sub} lacks the common flags");
    }
}

#[test]
fn evaluate_before_features_names_features() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["evaluate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("topocontro features"), "{err}");
    let summary: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert_eq!(summary["run_first"], "features");
    assert_eq!(summary["exit_code"], 2);

    let o = run(&["graphs"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("topocontro ingest"));
    let o = run(&["report"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("topocontro evaluate"));
}

#[test]
fn bundled_fixture_full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("synthetic_50.jsonl");
    for step in [
        vec!["ingest", input.to_str().unwrap()],
        vec!["graphs"],
        vec!["tda"],
        vec!["motifs"],
        vec!["features"],
        vec!["evaluate"],
        vec!["report"],
    ] {
        let o = run(&step, dir.path());
        assert!(o.status.success(), "{step:?}: {}", stderr(&o));
    }
    let csv = std::fs::read_to_string(dir.path().join("report/report.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    // 3 scenarios x 3 models x 2 feature sets
    assert_eq!(lines.len(), 1 + 18, "{csv}");
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",5,")), "{csv}");

    for m in [
        "store/ingest.manifest.json",
        "graphs/graphs.manifest.json",
        "tda/tda.manifest.json",
        "motifs/motifs.manifest.json",
        "features/features.manifest.json",
        "eval/evaluate.manifest.json",
        "report/report.manifest.json",
    ] {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(m)).unwrap()).unwrap();
        assert_eq!(v["config_hash"].as_str().unwrap().len(), 64, "{m}");
        assert!(!v["outputs"].as_array().unwrap().is_empty(), "{m}");
        assert!(v["version"].is_string() && v["seed"].is_u64(), "{m}");
    }
    assert!(dir.path().join("logs/features.jsonl").exists());

    let o = run(&["train", "--model", "rf", "--features", "f0+f3+f4", "--scenario", "A"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("models/A_random_forest_f0+f3+f4.json")).unwrap())
            .unwrap();
    assert_eq!(model["columns"].as_array().unwrap().len(), 4 + 13 + 128);
}

#[test]
fn bundled_fixture_is_generator_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["synth", "--n-posts", "50", "--controversial-frac", "0.2", "--seed", "7"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let a = std::fs::read(dir.path().join("synth/corpus.jsonl")).unwrap();
    assert_eq!(a, std::fs::read(fixture("synthetic_50.jsonl")).unwrap());
}

#[test]
fn synth_rejects_degenerate_fraction() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["0", "1"] {
        let o = run(&["synth", "--controversial-frac", f], dir.path());
        assert_eq!(o.status.code(), Some(1), "frac {f}");
    }
}

#[test]
fn synth_counts_follow_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["synth", "--n-posts", "100", "--controversial-frac", "0.129", "--seed", "3"], dir.path());
    assert!(o.status.success());
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("synth/summary.json")).unwrap()).unwrap();
    assert_eq!(s["posts"], 100);
    assert_eq!(s["controversial"], 13);
    assert!(s["mean_h1_controversial"].as_f64() > s["mean_h1_noncontroversial"].as_f64());
}

#[test]
fn ingest_reports_bad_lines_and_strict_fails() {
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(fixture("synthetic_50.jsonl")).unwrap();
    let first = good.lines().next().unwrap();
    let input = dir.path().join("in.jsonl");
    let unknown_field = first.replace("\"upvote_ratio\":", "\"upvote_ratio\":1.3,\"upvote\":");
    std::fs::write(&input, format!("{first}\n{{not json\n{unknown_field}\n")).unwrap();
    let o = run(&["ingest", input.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let errs = std::fs::read_to_string(dir.path().join("store/parse_errors.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = errs.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.iter().map(|l| l["line"].as_u64().unwrap()).collect::<Vec<_>>(), vec![2, 3]);

    let o = run(&["ingest", "--strict", input.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn duplicate_posts_last_file_wins() {
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(fixture("synthetic_50.jsonl")).unwrap();
    let first = good.lines().next().unwrap();
    let mut v: serde_json::Value = serde_json::from_str(first).unwrap();
    v["title"] = "replacement".into();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    std::fs::write(&a, format!("{first}\n")).unwrap();
    std::fs::write(&b, format!("{v}\n")).unwrap();
    let o = bin()
        .args(["ingest", a.to_str().unwrap(), b.to_str().unwrap(), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stderr(&o).contains("duplicate post_id"));
    let store = std::fs::read_to_string(dir.path().join("store/records.jsonl")).unwrap();
    assert_eq!(store.lines().count(), 1);
    assert!(store.contains("replacement"));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 5\n[label]\nmin_comments = 1000\n").unwrap();
    let input = fixture("synthetic_50.jsonl");
    let o = bin()
        .args(["ingest", input.to_str().unwrap(), "--quiet", "--config", cfg.to_str().unwrap(), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("store/summary.json")).unwrap()).unwrap();
    assert_eq!(s["excluded_too_few_comments"], 50);
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("store/ingest.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 5);

    let o = run(&["ingest", input.to_str().unwrap(), "--min-comments", "3", "--seed", "9"], dir.path());
    assert!(o.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("store/ingest.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 9);
    assert_eq!(m["config"]["label"]["min_comments"], 3);

    std::fs::write(&cfg, "sede = 5\n").unwrap();
    let o = bin().args(["graphs", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sede"));
}

#[test]
fn embeddings_feed_f1_and_f2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["synth", "--n-posts", "60", "--embedding-dim", "5"], dir.path());
    assert!(o.status.success());
    let corpus = dir.path().join("synth/corpus.jsonl");
    assert!(run(&["ingest", corpus.to_str().unwrap()], dir.path()).status.success());
    let o = run(&["features", "--sets", "f2+f3+f4"], dir.path());
    assert_eq!(o.status.code(), Some(1), "f2 without embeddings must fail");
    let emb = dir.path().join("synth/embeddings.jsonl");
    let o = run(&["features", "--sets", "f0,f2+f3+f4", "--embeddings", emb.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("features/features.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 2 + 4 + 5 + 13 + 128);
    let o = run(&["evaluate", "--models", "adaboost", "--scenarios", "C", "--seeds", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("eval/results.json")).unwrap()).unwrap();
    let sets: Vec<&str> = r["sets"].as_array().unwrap().iter().map(|s| s["features"].as_str().unwrap()).collect();
    assert_eq!(sets, vec!["f0", "f2+f3+f4"]);
}
