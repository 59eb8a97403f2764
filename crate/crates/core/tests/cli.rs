use std::process::{Command, Output};

use cheatlab::builders::ModelId;
use cheatlab::sdp::{canonicalize, facial_reduce, SdpaData};

fn cheatlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cheatlab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn no_arguments_prints_usage() {
    let out = cheatlab(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_model_is_a_usage_error() {
    assert_eq!(cheatlab(&["solve", "nonsense"]).status.code(), Some(2));
    assert_eq!(cheatlab(&["export", "nonsense", "sdpa", "/dev/null"]).status.code(), Some(2));
}

#[test]
fn solve_reports_value_and_certificate() {
    let out = cheatlab(&["solve", "bc_alice"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 0.75).abs() < 1e-6);
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["certificate"]["passed"], true);
}

#[test]
fn admm_backend_is_selectable() {
    let out = cheatlab(&["solve", "wcf_bob", "--backend", "admm"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["backend"], "admm");
    assert!((v["value"].as_f64().unwrap() - 0.75).abs() < 1e-5);
}

#[test]
fn exhausted_budget_exits_with_solver_failure() {
    let out = cheatlab(&["solve", "bc_alice", "--no-reduce", "--time-limit", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "max_iter");
}

#[test]
fn exported_sdpa_reimports_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bc_alice.dat-s");
    let out = cheatlab(&["export", "bc_alice", "sdpa", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let problem = "bc_alice".parse::<ModelId>().unwrap().build().unwrap();
    let direct = canonicalize(&facial_reduce(&problem).unwrap().problem).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let back = SdpaData::parse(&text).unwrap();
    assert_eq!(back, SdpaData::from_canonical(&direct, "bc_alice"));
}

#[test]
fn verify_accepts_reported_state_and_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, "[[0.25,0,0],[0,0.25,0],[0,0,0.5]]").unwrap();
    let out = cheatlab(&["verify", "switch_alice:bc+ot", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["achieved"].as_f64().unwrap() - 0.728557).abs() < 1e-4);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[[1,0,0],[0,1,0],[0,0,1]]").unwrap();
    let out = cheatlab(&["verify", "switch_alice:bc+ot", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["feasible"], false);
}

#[test]
fn list_names_every_model() {
    let out = cheatlab(&["list"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for m in ModelId::all() {
        assert!(text.contains(&m.name()), "{} missing", m.name());
    }
}
