use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const POSTS: &str = "\
u1\td1\tGraphs\t2020-01-05
u1\td1\tranking\t2020-01-05
u1\td2\tranking\t2020-02-01
u2\td1\tgraphs\t2020-02-10
u2\td3\tweb\t2020-03-01
u3\td2\tranking\t2020-03-02
u3\td3\tweb\t2020-04-01
u1\td3\tweb\t2020-04-15
u2\td2\tgraphs\t2020-05-20
u3\td1\tranking\t2020-06-01
";

const CONTENT: &str = "\
d1\tGraph ranking methods
d2\tRanking tags with graphs
d3\tWeb search engines
";

fn folkrank(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folkrank"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = folkrank(args, dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn workspace() -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("raw.tsv"), POSTS).unwrap();
    fs::write(dir.path().join("content.tsv"), CONTENT).unwrap();
    dir
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn pipeline_writes_outputs_and_manifests() {
    let dir = workspace();
    let p = dir.path();
    ok(&["ingest", "--input", "raw.tsv", "--out", "ingested"], p);
    ok(&["clean", "--input", "ingested/posts.tsv", "--out", "clean"], p);
    let cleaned = fs::read_to_string(p.join("clean/posts.tsv")).unwrap();
    assert!(cleaned.contains("\tgraphs\t") && !cleaned.contains("Graphs"));

    ok(&["core", "--input", "clean/posts.tsv", "--n", "2", "--out", "core"], p);
    ok(&["split", "--input", "clean/posts.tsv", "--method", "date", "--window", "2m", "--out", "split"], p);
    let test = fs::read_to_string(p.join("split/test.tsv")).unwrap();
    assert_eq!(test.lines().count(), 2, "{test}");

    let stdout = ok(
        &["evaluate", "--train", "split/train.tsv", "--test", "split/test.tsv", "--n-range", "1-3", "--out", "eval"],
        p,
    );
    assert_eq!(stdout.lines().count(), 3);
    for f in ["summary.csv", "details.tsv", "recall.dat", "metadata.json", "manifest.json"] {
        assert!(p.join("eval").join(f).exists(), "missing {f}");
    }
    let m = manifest(&p.join("eval"));
    assert_eq!(m["command"], "evaluate");
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["config"]["settings"]["variant"], "folksonomy");

    for dir in ["ingested", "clean", "core", "split"] {
        assert!(p.join(dir).join("manifest.json").exists(), "{dir}");
    }
}

#[test]
fn evaluate_is_reproducible() {
    let dir = workspace();
    let p = dir.path();
    ok(&["split", "--input", "raw.tsv", "--method", "loo", "--out", "split"], p);
    for out in ["a", "b"] {
        ok(
            &["--threads", "2", "evaluate", "--train", "split/train.tsv", "--test", "split/test.tsv", "--spreader", "pathrank", "--out", out],
            p,
        );
    }
    let a = fs::read(p.join("a/summary.csv")).unwrap();
    let b = fs::read(p.join("b/summary.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn recommend_prints_ranked_tags() {
    let dir = workspace();
    let p = dir.path();
    let out = ok(&["recommend", "--train", "raw.tsv", "--user", "u1", "--doc", "d2", "--n", "2"], p);
    let lines: Vec<Vec<&str>> = out.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(&lines[0][..3], ["u1", "d2", "1"]);
    assert_eq!(lines[1][2], "2");
    let s0: f64 = lines[0][4].parse().unwrap();
    let s1: f64 = lines[1][4].parse().unwrap();
    assert!(s0 >= s1);
}

#[test]
fn content_variant_needs_content_file() {
    let dir = workspace();
    let p = dir.path();
    let args = ["recommend", "--train", "raw.tsv", "--user", "u1", "--doc", "d3", "--variant", "content"];
    assert_eq!(folkrank(&args, p).status.code(), Some(1));
    let with = [&args[..], &["--content", "content.tsv"]].concat();
    assert!(!ok(&with, p).is_empty());
    ok(&["build-graph", "--input", "raw.tsv", "--variant", "content", "--content", "content.tsv", "--out", "g"], p);
    assert!(fs::read_to_string(p.join("g/graph.tsv")).unwrap().contains("user-word"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = workspace();
    let p = dir.path();
    fs::write(p.join("engine.conf"), "# engine\nspreader = pathrank\npl = 2\n").unwrap();
    ok(
        &["evaluate", "--train", "raw.tsv", "--test", "raw.tsv", "--config", "engine.conf", "--pl", "1", "--n-range", "1", "--out", "e"],
        p,
    );
    let m = manifest(&p.join("e"));
    assert_eq!(m["config"]["settings"]["spreader"], "pathrank");
    assert_eq!(m["config"]["settings"]["pl"], "1");

    fs::write(p.join("bad.conf"), "colour = blue\n").unwrap();
    let out = folkrank(&["recommend", "--train", "raw.tsv", "--user", "u1", "--doc", "d1", "--config", "bad.conf"], p);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn max_recall_bound() {
    let dir = workspace();
    let p = dir.path();
    let out = ok(&["max-recall", "--train", "raw.tsv", "--test", "raw.tsv", "--n-range", "1,2", "--out", "m"], p);
    assert!(out.contains("N=2\tmax_recall=1.0000"), "{out}");
    let csv = fs::read_to_string(p.join("m/max_recall.csv")).unwrap();
    assert!(csv.starts_with("N,max_recall,posts\n"));
}

#[test]
fn exit_codes() {
    let dir = workspace();
    let p = dir.path();
    assert_eq!(folkrank(&["frobnicate"], p).status.code(), Some(2));
    assert_eq!(folkrank(&["evaluate", "--train", "raw.tsv"], p).status.code(), Some(2));
    let missing = folkrank(&["clean", "--input", "nope.tsv", "--out", "x"], p);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.tsv"));
    let bad_b = folkrank(&["recommend", "--train", "raw.tsv", "--user", "u1", "--doc", "d1", "--b", "1.5"], p);
    assert_eq!(bad_b.status.code(), Some(1));
}

#[test]
fn unknown_query_falls_back_to_global_ranking() {
    use folkrank_core::dataset::read_posts_file;
    use folkrank_core::{EngineConfig, Recommender};

    let dir = workspace();
    let p = dir.path();
    let out = ok(&["recommend", "--train", "raw.tsv", "--user", "u9", "--doc", "d9", "--n", "3"], p);
    let printed: Vec<String> = out.lines().map(|l| l.split('\t').nth(3).unwrap().to_owned()).collect();

    let (ds, _) = read_posts_file(p.join("raw.tsv")).unwrap();
    let rec = Recommender::new(EngineConfig::default(), &ds, None).unwrap();
    let global = rec.global_ranking().unwrap();
    let expected: Vec<String> = global.top(3).iter().map(|(t, _)| t.clone()).collect();
    assert_eq!(printed, expected);
}
