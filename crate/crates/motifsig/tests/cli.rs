//! End-to-end checks of the `motifsig` binary: subcommand behavior, exit
//! codes, and report schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn motifsig(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motifsig"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = motifsig(dir, args);
    assert!(
        out.status.success(),
        "motifsig {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

fn gen_small(dir: &Path, out: &str) {
    ok(
        dir,
        &["gen", "--kinds", "all", "--psi", "12", "--count", "2", "--seed", "42", "--out", out],
    );
}

fn sign_small(dir: &Path, input: &str, out: &str) {
    ok(
        dir,
        &["sign", "--input", input, "--samples", "25", "--seed", "7", "--out", out],
    );
}

#[test]
fn gen_deterministic_six_cluster_file() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["gen", "--kinds", "all", "--psi", "100", "--count", "1", "--seed", "1", "--out", "a.jsonl"],
    );
    ok(
        dir.path(),
        &["gen", "--kinds", "all", "--psi", "100", "--count", "1", "--seed", "1", "--out", "b.jsonl"],
    );
    let a = read(dir.path(), "a.jsonl");
    assert_eq!(a, read(dir.path(), "b.jsonl"), "reruns are byte-identical");

    let ids: std::collections::HashSet<String> = String::from_utf8(a)
        .unwrap()
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            v["cluster_id"].as_str().unwrap().to_string()
        })
        .collect();
    assert_eq!(ids.len(), 6);
}

#[test]
fn gen_rejects_tiny_population() {
    let dir = TempDir::new().unwrap();
    let out = motifsig(dir.path(), &["gen", "--psi", "1", "--seed", "1", "--out", "x.jsonl"]);
    assert_eq!(out.status.code(), Some(1), "usage error exit code");
    assert!(!dir.path().join("x.jsonl").exists());
}

#[test]
fn gen_csv_round_trips_through_sign() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["gen", "--kinds", "scan,worm", "--psi", "10", "--seed", "3", "--format", "csv", "--out", "c.csv"],
    );
    let text = String::from_utf8(read(dir.path(), "c.csv")).unwrap();
    assert!(text.starts_with("cluster_id,src_ip,src_port,dst_ip,dst_port,label\n"));
    sign_small(dir.path(), "c.csv", "c.sigs");
    let sigs = String::from_utf8(read(dir.path(), "c.sigs")).unwrap();
    assert_eq!(sigs.lines().count(), 2);
}

#[test]
fn sign_emits_one_labeled_record_per_cluster() {
    let dir = TempDir::new().unwrap();
    gen_small(dir.path(), "corpus.jsonl");
    sign_small(dir.path(), "corpus.jsonl", "sigs.jsonl");
    let text = String::from_utf8(read(dir.path(), "sigs.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 12);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["z"].as_array().unwrap().len(), 16);
        assert_eq!(v["motif_order"], "triad-census-v1");
        assert_eq!(v["hosts"], 12);
        assert!(v["label"].is_string());
        assert!(v["z"].as_array().unwrap().iter().all(|x| x.is_f64()));
    }
}

#[test]
fn sim_of_a_signature_with_itself_is_one() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "--kinds", "ddos", "--psi", "20", "--seed", "5", "--out", "one.jsonl"]);
    sign_small(dir.path(), "one.jsonl", "one.sigs");
    let out = ok(dir.path(), &["sim", "one.sigs", "one.sigs"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1.000000\n");
}

#[test]
fn sim_refuses_multi_signature_files() {
    let dir = TempDir::new().unwrap();
    gen_small(dir.path(), "corpus.jsonl");
    sign_small(dir.path(), "corpus.jsonl", "sigs.jsonl");
    let out = motifsig(dir.path(), &["sim", "sigs.jsonl", "sigs.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
}

/// Builds a small labeled corpus, a reference file from one attack per
/// kind, and signatures for both.
fn classify_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    ok(
        dir,
        &["gen", "--kinds", "all", "--psi", "30", "--count", "3", "--seed", "11", "--out", "corpus.jsonl"],
    );
    ok(
        dir,
        &["gen", "--kinds", "all", "--psi", "30", "--count", "1", "--seed", "12", "--out", "refs.jsonl"],
    );
    sign_small(dir, "corpus.jsonl", "corpus.sigs");
    sign_small(dir, "refs.jsonl", "refs.sigs");
    (dir.join("corpus.sigs"), dir.join("refs.sigs"))
}

#[test]
fn classify_assigns_everything_at_tau_zero() {
    let dir = TempDir::new().unwrap();
    classify_fixture(dir.path());
    ok(
        dir.path(),
        &["classify", "--sigs", "corpus.sigs", "--refs", "refs.sigs", "--tau", "0", "--out", "a.csv"],
    );
    let text = String::from_utf8(read(dir.path(), "a.csv")).unwrap();
    assert!(text.starts_with("cluster_id,label,similarity\n"));
    assert_eq!(text.lines().count(), 19, "header plus 18 attacks");
    assert!(!text.contains("UNMATCHED"));
}

#[test]
fn classify_self_references_scores_one() {
    let dir = TempDir::new().unwrap();
    classify_fixture(dir.path());
    // The reference file classified against itself: every attack matches
    // its own signature exactly.
    ok(
        dir.path(),
        &["classify", "--sigs", "refs.sigs", "--refs", "refs.sigs", "--tau", "0.9", "--out", "self.csv"],
    );
    let text = String::from_utf8(read(dir.path(), "self.csv")).unwrap();
    for line in text.lines().skip(1) {
        let mut parts = line.split(',');
        let id = parts.next().unwrap();
        let label = parts.next().unwrap();
        let sim = parts.next().unwrap();
        assert!(id.starts_with(label), "{id} labeled {label}");
        assert_eq!(sim, "1.000000");
    }
}

#[test]
fn classify_validates_tau() {
    let dir = TempDir::new().unwrap();
    classify_fixture(dir.path());
    let out = motifsig(
        dir.path(),
        &["classify", "--sigs", "corpus.sigs", "--refs", "refs.sigs", "--tau", "1.5", "--out", "x.csv"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cluster_emits_all_artifacts() {
    let dir = TempDir::new().unwrap();
    classify_fixture(dir.path());
    ok(
        dir.path(),
        &[
            "cluster", "--sigs", "corpus.sigs", "--tau", "0.85", "--out", "clusters.json",
            "--dendrogram", "dendro.json", "--dot", "dendro.dot", "--derived-refs", "derived.json",
            "--sweep", "0.5:0.9:0.1", "--sweep-out", "sweep.csv",
        ],
    );
    let clusters: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "clusters.json")).unwrap();
    assert_eq!(clusters["tau"], 0.85);
    assert!(clusters["cluster_count"].as_u64().unwrap() >= 1);

    let dendro: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "dendro.json")).unwrap();
    assert_eq!(dendro["leaves"].as_array().unwrap().len(), 18);
    assert_eq!(dendro["merges"].as_array().unwrap().len(), 17);

    let dot = String::from_utf8(read(dir.path(), "dendro.dot")).unwrap();
    assert!(dot.starts_with("digraph dendrogram {"));

    let derived: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "derived.json")).unwrap();
    assert!(derived.as_array().unwrap().len() >= 1);
    assert_eq!(derived[0]["name"], "scenario-000");

    let sweep = String::from_utf8(read(dir.path(), "sweep.csv")).unwrap();
    assert!(sweep.starts_with("tau,clusters\n"));
    assert_eq!(sweep.lines().count(), 6);
}

#[test]
fn single_signature_clusters_alone() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "--kinds", "conv", "--psi", "10", "--seed", "2", "--out", "one.jsonl"]);
    sign_small(dir.path(), "one.jsonl", "one.sigs");
    ok(
        dir.path(),
        &["cluster", "--sigs", "one.sigs", "--tau", "0.9", "--out", "one.clusters.json"],
    );
    let v: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "one.clusters.json")).unwrap();
    assert_eq!(v["cluster_count"], 1);
    assert_eq!(v["clusters"][0]["size"], 1);
}

#[test]
fn eval_emits_all_sections() {
    let dir = TempDir::new().unwrap();
    classify_fixture(dir.path());
    ok(
        dir.path(),
        &[
            "eval", "--sigs", "corpus.sigs", "--refs", "refs.sigs",
            "--json", "metrics.json", "--csv", "metrics.csv",
        ],
    );
    let v: serde_json::Value = serde_json::from_slice(&read(dir.path(), "metrics.json")).unwrap();
    for key in [
        "tau",
        "tau_source",
        "class_similarity",
        "tau_windows",
        "global_window",
        "classification",
        "overlap",
    ] {
        assert!(v.get(key).is_some(), "metrics.json lacks {key}");
    }
    assert_eq!(v["tau_source"], "window-midpoint");
    assert_eq!(v["class_similarity"].as_array().unwrap().len(), 6);
    assert_eq!(v["classification"]["total"], 18);

    let csv = String::from_utf8(read(dir.path(), "metrics.csv")).unwrap();
    assert!(csv.starts_with("section,scenario,metric,value\n"));
    for section in ["run", "class_similarity", "global_window", "classification", "overlap"] {
        assert!(csv.lines().any(|l| l.starts_with(section)), "csv lacks {section} rows");
    }
}

#[test]
fn eval_requires_labels() {
    let dir = TempDir::new().unwrap();
    classify_fixture(dir.path());
    // Strip labels from the signature file.
    let stripped: String = String::from_utf8(read(dir.path(), "corpus.sigs"))
        .unwrap()
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("label");
            format!("{v}\n")
        })
        .collect();
    std::fs::write(dir.path().join("unlabeled.sigs"), stripped).unwrap();
    let out = motifsig(
        dir.path(),
        &["eval", "--sigs", "unlabeled.sigs", "--refs", "refs.sigs", "--json", "m.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("broken.jsonl"), b"{\"cluster_id\":\"c\"\n").unwrap();
    let out = motifsig(
        dir.path(),
        &["sign", "--input", "broken.jsonl", "--seed", "1", "--out", "x.sigs"],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 1"), "error names the line: {stderr}");
}

#[test]
fn missing_file_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let out = motifsig(
        dir.path(),
        &["sign", "--input", "nope.jsonl", "--seed", "1", "--out", "x.sigs"],
    );
    assert_eq!(out.status.code(), Some(2));
}
