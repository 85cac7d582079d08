use std::path::Path;
use std::process::{Command, Output};

use seqval::{Dataset, ValueAssignment};

fn seqval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqval")).args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn generate(dir: &Path, name: &str, per_class: usize, seed: u64) -> String {
    let out = path(dir, name);
    let o = seqval(&["generate", "--n-per-class", &per_class.to_string(), "--seed", &seed.to_string(), "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn generate_value_select_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let train = generate(dir.path(), "train.csv", 3, 1);
    let valid = generate(dir.path(), "valid.csv", 5, 2);
    let test = generate(dir.path(), "test.csv", 10, 3);
    let ds = Dataset::load(&train).unwrap();
    assert_eq!((ds.len(), ds.dim()), (9, 3));
    assert!(std::fs::read_to_string(&train).unwrap().starts_with("f0,f1,f2,label\n"));

    let values = path(dir.path(), "v.json");
    let o = seqval(&["value", "--method", "shapley", "--train", &train, "--valid", &valid, "--out", &values]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = ValueAssignment::load(&values).unwrap();
    assert_eq!((v.method.as_str(), v.len()), ("shapley", 9));

    let dp = path(dir.path(), "dp.json");
    assert!(seqval(&["dp", "--train", &train, "--valid", &valid, "--out", &dp]).status.success());
    let sol: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dp).unwrap()).unwrap();
    assert_eq!(sol["perm"].as_array().unwrap().len(), 9);
    assert!(sol["objective"].is_f64());

    let curve = path(dir.path(), "curve.csv");
    let o = seqval(&["select", "--values", &values, "--train", &train, "--test", &test, "--out", &curve]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&curve).unwrap();
    assert!(text.starts_with("k,utility\n1,"));
    assert_eq!(text.lines().count(), 10);

    // the value file must match the training set
    let o = seqval(&["select", "--values", &values, "--train", &test, "--test", &test, "--out", &curve]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bipartite_and_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let train = generate(dir.path(), "train.csv", 8, 1);
    let valid = generate(dir.path(), "valid.csv", 8, 2);
    let out = path(dir.path(), "bip");
    let o = seqval(&["bipartite", "--train", &train, "--valid", &valid, "--n-subsets", "5", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["graph.json", "sweep.csv", "values.json", "selection.json"] {
        assert!(Path::new(&out).join(f).exists(), "{f}");
    }
    let sweep = std::fs::read_to_string(Path::new(&out).join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("tau,error\n"));
    assert_eq!(sweep.lines().count(), 21);

    let curv = path(dir.path(), "c.json");
    let graph = path(Path::new(&out), "graph.json");
    let o = seqval(&["curvature", "--graph", &graph, "--active-only", "--out", &curv]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&curv).unwrap()).unwrap();
    let c = rep["c"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&c));
}

#[test]
fn report_writes_experiment_and_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let config = path(dir.path(), "exp.json");
    std::fs::write(
        &config,
        r#"{
  "dataset": {"gmm": {"n_per_class": 15, "classes": 3, "dim": 3, "separation": 2.0, "seed": 1}},
  "splits": {"train": 8, "valid": 12, "test": 20},
  "methods": ["dp", "shapley", "wls:banzhaf", "random"],
  "n_runs": 2,
  "trainer": {"iterations": 100}
}"#,
    )
    .unwrap();
    let out = path(dir.path(), "report");
    let o = seqval(&["report", "--config", &config, "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = Path::new(&out);
    for f in ["config.json", "summary.json", "gap_report.json", "gaps.csv", "curves/wls_banzhaf.csv", "runs/1/dp.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let gaps: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("gap_report.json")).unwrap()).unwrap();
    for e in gaps["entries"].as_array().unwrap() {
        assert!(e["objective_gap"].as_f64().unwrap() >= -1e-12);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(seqval(&["sweep"]).status.code(), Some(2));
    let missing = path(dir.path(), "missing.csv");
    let out = path(dir.path(), "v.json");
    let o = seqval(&["value", "--method", "shapley", "--train", &missing, "--valid", &missing, "--out", &out]);
    assert_ne!(o.status.code(), Some(0));
    let train = generate(dir.path(), "train.csv", 3, 1);
    let o = seqval(&["value", "--method", "beta:0,1", "--train", &train, "--valid", &train, "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    let o = seqval(&["dp", "--train", &train, "--valid", &train, "--cap", "5", "--out", &out]);
    assert_eq!(o.status.code(), Some(3));
}
