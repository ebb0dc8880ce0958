use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use spinverify::{default_suite, parse_config, Entry};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spinverify"));
    c.env_remove("SPINVERIFY_JOBS");
    c
}

fn run_config(text: &str, extra: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, text).unwrap();
    bin().arg("run").arg(&path).args(extra).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const SMALL: &str = r#"[
  {"check_id": "macdonald", "params": {"p": 3, "K": 6}},
  {"check_id": "factorization", "params": {"K": 5}},
  {"check_id": "alpha-chi", "params": {"p": 2, "D": -7, "K": 2, "samples": 10}},
  {"check_id": "w-identity", "params": {"samples": 50, "seed": 9}},
  {"check_id": "contour", "params": {"r": 4, "y": 1.0}},
  {"check_id": "orbits", "params": {"p": 3, "D": -1}}
]"#;

#[test]
fn reruns_are_byte_identical_across_job_counts() {
    let a = run_config(SMALL, &["--jobs", "1"]);
    let b = run_config(SMALL, &["--jobs", "4"]);
    let c = run_config(SMALL, &["--jobs", "4"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn reports_follow_config_order_and_schema() {
    let out = run_config(SMALL, &[]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    let ids: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["check_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["macdonald", "factorization", "alpha-chi", "w-identity", "contour", "orbits"]);
    let first = text.split("\n    },\n    {").next().unwrap();
    let pos: Vec<usize> = ["check_id", "params", "status", "lhs", "rhs", "max_discrepancy", "detail", "seed"]
        .iter()
        .map(|k| first.find(&format!("\n      \"{k}\":")).unwrap_or_else(|| panic!("{k}")))
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
    assert!(text.find("\"schema\": 1").unwrap() < text.find("\"reports\"").unwrap());
    assert!(!text.contains("runtime_ms"));
    assert_eq!(v["summary"]["total"], 6);
}

#[test]
fn empty_config_exits_zero() {
    let out = run_config("[]", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"]["total"], 0);
}

#[test]
fn malformed_descriptor_is_reported_with_nonzero_exit() {
    let out = run_config(r#"[{"check_id": "factorization"}, {"params": {}}, {"check_id": "orbits", "params": {"p": "three"}}]"#, &[]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let status: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(status, ["pass", "error", "error"]);
    assert_eq!(v["summary"]["errors"], 2);
}

#[test]
fn unreadable_config_exits_two() {
    assert_eq!(run_config("{not json", &[]).status.code(), Some(2));
    assert_eq!(run_config(r#"{"check_id": "orbits"}"#, &[]).status.code(), Some(2));
}

#[test]
fn failing_check_carries_a_witness() {
    let out = bin().args(["check", "contour", "--weight", "2", "--tol", "1e-300"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r = &json(&out)["reports"][0];
    assert_eq!(r["status"], "fail");
    assert!(r["witness"].is_object() || r["witness"].is_array() || r["witness"].is_string());
}

#[test]
fn flags_override_only_matching_keys() {
    let cfg = r#"[{"check_id": "macdonald", "params": {"K": 4}}, {"check_id": "w-identity", "params": {"samples": 5}}]"#;
    let v = json(&run_config(cfg, &["--p", "7", "--seed", "3"]));
    assert_eq!(v["reports"][0]["params"]["p"], 7);
    assert_eq!(v["reports"][1]["params"].get("p"), None);
    assert_eq!(v["reports"][1]["seed"], 3);
}

#[test]
fn text_format_and_timings() {
    let out = bin().args(["check", "orbits", "--p", "5", "--disc", "-1", "--format", "text", "--timings"]).output().unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(s.lines().count(), 1);
    assert!(s.starts_with("✓ orbits [D=-1 p=5]") && s.contains(" ms)"), "{s}");
}

#[test]
fn jobs_env_is_validated() {
    let out = bin().env("SPINVERIFY_JOBS", "many").args(["check", "orbits"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().env("SPINVERIFY_JOBS", "2").args(["check", "orbits"]).output().unwrap();
    assert!(out.status.success());
}

#[test]
fn list_names_every_check() {
    let out = bin().args(["list", "--format", "json"]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), spinverify::registry().len());
}

#[test]
fn shipped_config_matches_default_suite() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json");
    let entries = parse_config(&std::fs::read_to_string(path).unwrap()).unwrap();
    let descs: Vec<_> = entries
        .into_iter()
        .map(|e| match e {
            Entry::Descriptor(d) => d,
            Entry::Malformed { reason, .. } => panic!("{reason}"),
        })
        .collect();
    assert_eq!(descs, default_suite());
}
