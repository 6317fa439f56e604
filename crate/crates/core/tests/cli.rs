use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cma_env(args: &[&str], env: &[(&str, &str)]) -> Out {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cma"));
    cmd.args(args).env_remove("CMA_CONSTRAINTS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let o = cmd.output().expect("binary runs");
    Out {
        code: o.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
    }
}

fn cma(args: &[&str]) -> Out {
    cma_env(args, &[])
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = cma(&full);
    assert_eq!(o.code, 0, "{args:?}: {}{}", o.stdout, o.stderr);
    serde_json::from_str(&o.stdout).expect("one JSON document")
}

fn documented_keys() -> BTreeMap<String, BTreeSet<String>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/cli-json.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn documented_examples() {
    let o = cma(&["occupancy", "--machine", "wheel:2,loops=a", "--mode", "stationary"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout, "q0\t0.666667\nq1\t0.333333\n");

    assert_eq!(cma(&["classify", "--machine", "chain:5"]).stdout, "L(5)\n");

    let o = cma(&["parse", "--lexicon", "demo", "--sentence", "Eleanor broke the record"]);
    assert_eq!(o.stdout.lines().count(), 1);
    assert!(o.stdout.starts_with("[S "));
    assert!(o.stdout.contains("{record1,record2,record3}"));
}

#[test]
fn json_keys_match_the_docs() {
    let docs = documented_keys();
    let dot = tempfile::NamedTempFile::new().unwrap();
    let dot_path = dot.path().display().to_string();
    let store = data("store.json");
    let script = data("write.tape");
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("validate", vec!["validate", "--machine", "wheel:4"]),
        ("simulate", vec!["simulate", "--machine", "wheel:2", "--inner", "q0=wheel:3", "--inner", "q1=wheel:5", "--ticks", "1000", "--seed", "1"]),
        ("occupancy", vec!["occupancy", "--machine", "wheel:2,loops=a", "--mode", "path-count"]),
        ("approx-dist", vec!["approx-dist", "--probs", "0.5,0.3,0.2", "--eps", "0.01"]),
        ("sync-word", vec!["sync-word", "--machine", "wire:01"]),
        ("classify", vec!["classify", "--machine", "wheel:7"]),
        ("cycle-length", vec!["cycle-length", "--machine", "wheel:2", "--inner", "q0=wheel:3", "--inner", "q1=wheel:5"]),
        ("bisim", vec!["bisim", "--left", "wheel:4", "--right", "wheel:2"]),
        ("tape", vec!["tape", "--script", &script, "--inject-fault", "1:2"]),
        ("fluent", vec!["fluent", "eval", "--store", &store, "--at", "2.0", "--fluent", "Day"]),
        ("parse", vec!["parse", "--sentence", "Eleanor broke the record"]),
        ("activate", vec!["activate", "--inject", "y", "--steps", "2"]),
        ("export-dot", vec!["export-dot", "--machine", "wheel:3", "--out", &dot_path]),
    ];
    for (name, args) in runs {
        let v = json(&args);
        assert_eq!(keys(&v), docs[name], "{name}");
    }
    let o = cma(&["--format", "json", "classify", "--machine", "wire:01"]);
    assert_eq!(o.code, 1);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(keys(&v), docs["error"]);
    assert_eq!(v["error"]["kind"], "unsupported");
}

#[test]
fn reports_carry_the_numbers() {
    let v = json(&["cycle-length", "--prime-powers", "10000"]);
    assert!(v["digits"].as_u64().unwrap() > 4348);
    assert_eq!(v["simulated"], false);

    let v = json(&["classify", "--machine", "chain:4,loops=3"]);
    assert_eq!(v["class"], "L(4)");
    assert_eq!(v["detail"]["absorbing"], true);

    let v = json(&["tape", "--script", &data("write.tape"), "--inject-fault", "0:2"]);
    assert_eq!(v["tape"]["content"].as_str().unwrap()[..2].to_string(), "04");
    assert_eq!(v["fault"]["corrected"], true);

    let store = data("store.json");
    let v = json(&["fluent", "eval", "--store", &store, "--at", "2.0", "--fluent", "Day", "--mode", "exists"]);
    assert_eq!(v["value"], "true");
    let v = json(&["fluent", "eval", "--store", &store, "--at", "2.1", "--fluent", "awake"]);
    assert_eq!(v["value"], "undefined");

    let v = json(&["parse", "--sentence", "Eleanor broke the record", "--context", "Eleanor:athlete"]);
    let text = v.to_string();
    assert!(text.contains("record3") && !text.contains("record1"));

    let v = json(&["activate", "--inject", "die(y)", "--inject", "die(y)", "--inject", "y", "--inject", "y", "--steps", "3"]);
    assert_eq!(v["trace"][1]["fired"], serde_json::json!(["grief(x)"]));
}

#[test]
fn exit_codes() {
    let o = cma(&["occupancy", "--machine", "wheel:3", "--frobnicate"]);
    assert_eq!(o.code, 2);
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());

    let o = cma(&["classify", "--machine", "wire:01"]);
    assert_eq!(o.code, 1);
    assert_eq!(o.stdout.lines().count(), 1);
    assert!(o.stdout.starts_with("error[unsupported]"));

    assert_eq!(cma(&["parse", "--sentence", "Eleanor broke the vase"]).code, 1);
    assert_eq!(cma(&["classify", "--machine", "nonsense"]).code, 1);
    assert_eq!(cma(&["--format", "json", "simulate", "--machine", "wheel:3"]).code, 2);
    assert_eq!(cma(&["--format", "json", "occupancy", "--machine", "wheel:3", "--mode", "mc"]).code, 2);
    assert_eq!(cma(&["--help"]).code, 0);
}

#[test]
fn seeded_runs_repeat() {
    let args = ["occupancy", "--machine", "wheel:2,loops=a", "--mode", "mc", "--steps", "5000", "--seed", "9"];
    assert_eq!(json(&args), json(&args));
}

#[test]
fn constraint_overrides() {
    assert_eq!(cma(&["classify", "--machine", "wheel:20"]).code, 0);
    let o = cma_env(&["classify", "--machine", "wheel:20"], &[("CMA_CONSTRAINTS", "m=10")]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("constraint"));
    let o = cma_env(&["validate", "--machine", "wheel:20"], &[("CMA_CONSTRAINTS", "m=10")]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("ss [states]"));
    assert_eq!(cma_env(&["classify", "--machine", "wheel:2"], &[("CMA_CONSTRAINTS", "q=1")]).code, 2);
}

#[test]
fn machine_files_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("w.json");
    std::fs::write(&doc, cma::menagerie::wheel(6).to_json()).unwrap();
    let doc = doc.display().to_string();
    assert_eq!(cma(&["classify", "--machine", &doc]).stdout, "C(6)\n");

    let out = dir.path().join("w.dot");
    let o = cma(&["export-dot", "--machine", &doc, "--out", &out.display().to_string()]);
    assert_eq!(o.code, 0);
    assert!(std::fs::read_to_string(out).unwrap().starts_with("digraph"));
}

#[test]
fn cluster_files() {
    let dir = tempfile::tempdir().unwrap();
    let node = cma::cluster::ClusterNode::leaf(cma::menagerie::wheel(2), 1)
        .with_inner("q0", cma::cluster::ClusterNode::leaf(cma::menagerie::wheel(3), 0))
        .unwrap()
        .with_inner("q1", cma::cluster::ClusterNode::leaf(cma::menagerie::wheel(5), 0))
        .unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, node.to_json()).unwrap();
    let path = path.display().to_string();
    assert_eq!(json(&["cycle-length", "--cluster", &path])["value"], "30");
    assert_eq!(cma(&["classify", "--cluster", &path]).stdout, "C(30)\n");
    let v = json(&["validate", "--cluster", &path]);
    assert_eq!(v["valid"], true);
    let o = cma(&["simulate", "--cluster", &path, "--ticks", "100000", "--policy", "current"]);
    assert_eq!(o.code, 0);
}

#[test]
fn every_subcommand_is_quick() {
    let store = data("store.json");
    let script = data("write.tape");
    let runs: Vec<Vec<&str>> = vec![
        vec!["occupancy", "--machine", "wheel:2,loops=a", "--mode", "mc", "--steps", "1000000", "--seed", "1"],
        vec!["simulate", "--machine", "wheel:2", "--inner", "q0=wheel:3", "--inner", "q1=wheel:5", "--ticks", "100000"],
        vec!["cycle-length", "--prime-powers", "10000"],
        vec!["tape", "--script", &script, "--idle", "10000"],
        vec!["fluent", "eval", "--store", &store, "--at", "3.0", "--fluent", "Night"],
        vec!["approx-dist", "--probs", "0.3333,0.6667", "--eps", "0.0001"],
    ];
    for args in runs {
        let t = Instant::now();
        let o = cma(&args);
        assert_eq!(o.code, 0, "{args:?}: {}", o.stdout);
        assert!(t.elapsed() < Duration::from_secs(10), "{args:?}");
    }
}
