use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn spoq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spoq")).args(args).env_remove("SPOQ_MODE").output().expect("spawn spoq")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spoq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn full_suite_one_zero() {
    let o = spoq(&["all", "--n", "1", "--m", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_of(&o);
    assert_eq!(v["passed"], true);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["anchor"].as_str().is_some_and(|a| !a.is_empty()));
        assert!(c["mode"].as_str().unwrap().starts_with("proved") || c["mode"].as_str().unwrap().starts_with("evidence"));
    }
}

#[test]
fn specialized_suite_one_one() {
    let o = spoq(&["all", "--n", "1", "--m", "1", "--q-spec", "2,3,5,7/2,11", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_of(&o);
    let modes: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["mode"].as_str().unwrap()).collect();
    assert!(modes.iter().any(|m| m.contains("specialized at 5 points")));
}

#[test]
fn corrupted_metric_fails_with_witness() {
    let path = tmp("corrupted.json");
    std::fs::write(&path, r#"{"c": {"-1": "-q^-1", "1": "q^2"}, "mode": "q"}"#).unwrap();
    let o = spoq(&["frt", "--n", "1", "--m", "0", "--metric", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&o);
    let ybe = &v["checks"][0];
    assert_eq!(ybe["anchor"], "graded-ybe");
    assert_eq!(ybe["passed"], false);
    assert!(ybe["detail"]["witness"]["row"].is_array());
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        vec!["frt-check", "--n", "1", "--m", "0", "--q-spec", "2,2"],
        vec!["frt-check", "--n", "1", "--m", "0", "--q-spec", "1"],
        vec!["ybe", "--n", "0", "--m", "0"],
        vec!["export", "bogus", "--n", "1", "--m", "0"],
        vec!["weyl", "--n", "1", "--m", "0", "--source", "nowhere"],
        vec!["nf", "--n", "1", "--m", "0", "--word", "x7"],
        vec!["ybe", "--n", "1", "--m", "0", "--metric", "/nonexistent/metric.json"],
    ] {
        assert_eq!(spoq(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn rmatrix_export_schema_and_determinism() {
    let a = tmp("r-a.json");
    let b = tmp("r-b.json");
    for p in [&a, &b] {
        let o = spoq(&["export", "rmatrix", "--n", "1", "--m", "0", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["arity"], 2);
    assert_eq!(v["degree"], 0);
    assert!(!v["entries"].as_array().unwrap().is_empty());
}

#[test]
fn weyl_latex_export_has_eight_relations() {
    let o = spoq(&["export", "relations", "--n", "1", "--m", "1", "--c", "1", "--format", "latex"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 8, "{text}");
    assert!(text.contains("x_{-1} x_{1}"));
}

#[test]
fn reports_are_reproducible() {
    let args = ["all", "--n", "1", "--m", "1", "--q-spec", "random:5", "--seed", "7"];
    let (a, b) = (spoq(&args), spoq(&args));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn normal_form_of_quantum_plane_word() {
    let o = spoq(&["nf", "--n", "1", "--m", "0", "--word", "x-1 x1"]);
    let v = json_of(&o);
    assert_eq!(v["normal_form"], "(q^2) x1 x-1");
}

#[test]
fn half_integer_mode() {
    let o = Command::new(env!("CARGO_BIN_EXE_spoq")).args(["ybe", "--n", "1", "--m", "1"]).env("SPOQ_MODE", "v").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o)["config"]["mode"], "v");
}

#[test]
fn metric_derivation_matches_cache() {
    let o = spoq(&["metric", "derive", "--n", "1", "--m", "1", "--bound", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o)["matches_cache"], true);
    assert_eq!(spoq(&["metric", "derive", "--n", "1", "--m", "1", "--bound", "2"]).status.code(), Some(2));
}

#[test]
fn rform_eval_on_generators() {
    let o = spoq(&["rform-eval", "--n", "1", "--m", "0", "--a", "t(1,1)", "--b", "t(1,1)"]);
    assert_eq!(json_of(&o)["value"], "q");
    let o = spoq(&["rform-eval", "--n", "1", "--m", "0", "--a", "t(1,1) t(1,1) t(1,1) t(1,1) t(1,1)", "--b", "t(1,1)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn weyl_hilbert_matches_ordered_monomials() {
    let o = spoq(&["weyl", "--n", "1", "--m", "1", "--c", "1", "--hilbert", "3"]);
    let v = json_of(&o);
    assert_eq!(v["extra"]["hilbert"]["cumulative_dims"], v["extra"]["hilbert"]["ordered_monomials"]);
}

#[test]
fn weyl_export_round_trips() {
    let p = tmp("weyl.json");
    let o = spoq(&["weyl", "--n", "1", "--m", "1", "--c", "1", "--export", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 4);
    assert_eq!(v["relations"].as_array().unwrap().len(), 8);
}
