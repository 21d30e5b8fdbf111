use std::process::{Command, Output};

use serde_json::Value;

fn addcomb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_addcomb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json artifact")
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(addcomb(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(addcomb(&["cover", "build", "--bogus"]).status.code(), Some(2));
    assert_eq!(addcomb(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn invalid_parameters_are_usage_errors() {
    let out = addcomb(&["cayley", "sample", "--factors", "10", "--p", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = addcomb(&["ap", "scan", "--p", "100", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = addcomb(&["cover", "build", "--factors", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonsumset_needs_a_group() {
    assert_eq!(addcomb(&["nonsumset", "f"]).status.code(), Some(2));
    assert_eq!(addcomb(&["nonsumset", "f", "--n", "5", "--max-n", "6"]).status.code(), Some(2));
    assert_eq!(addcomb(&["nonsumset", "search", "--p", "0.2"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(addcomb(&["--help"]).status.code(), Some(0));
}

#[test]
fn cover_build_example_is_sandwich_verified() {
    let out = addcomb(&["cover", "build", "--factors", "512", "--density", "0.25", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["header"]["schema_version"], 1);
    assert_eq!(doc["header"]["seed"], 7);
    assert_eq!(doc["header"]["config_hash"].as_str().unwrap().len(), 64);
    let result = &doc["result"];
    assert_eq!(result["element"]["verification"]["status"], "sandwich-verified");
    assert!(result["level_size"].as_u64() <= result["cover_size"].as_u64());
    assert!(result["cover_size"].as_u64() <= result["target_size"].as_u64());
}

#[test]
fn same_seed_same_bytes() {
    let args = ["cayley", "alpha", "--factors", "36", "--p", "0.2", "--kind", "sum", "--seed", "11"];
    let a = addcomb(&args);
    let b = addcomb(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let other = addcomb(&["cayley", "alpha", "--factors", "36", "--p", "0.2", "--kind", "sum", "--seed", "12"]);
    assert_ne!(json_of(&a)["header"]["config_hash"], json_of(&other)["header"]["config_hash"]);
}

#[test]
fn verify_all_quick_is_deterministic() {
    let a = addcomb(&["verify-all", "--quick"]);
    let b = addcomb(&["verify-all", "--quick"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let doc = json_of(&a);
    assert_eq!(doc["result"]["outcomes"].as_array().unwrap().len(), 13);
}

#[test]
fn verify_all_strict_names_first_failure() {
    let out = addcomb(&["verify-all", "--quick", "--strict"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    let doc = json_of(&out);
    let failed = doc["result"]["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|o| o["passed"] == false)
        .cloned();
    match failed {
        Some(o) => {
            assert_eq!(out.status.code(), Some(1));
            assert!(stderr.contains(&format!("criterion {:02}", o["id"].as_u64().unwrap())), "{stderr}");
        }
        None => assert_eq!(out.status.code(), Some(0)),
    }
}

#[test]
fn csv_carries_header_line() {
    let out = addcomb(&["nonsumset", "f", "--max-n", "12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# schema_version=1 command=nonsumset f seed="));
    assert!(header.contains("config_hash="));
    assert_eq!(lines.next(), Some("order,f"));
    let f: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(f, ["1", "1", "1", "1", "1", "1", "3", "1", "3", "1", "3", "2"]);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("addcomb-cli-test-{}.json", std::process::id()));
    let out = addcomb(&["cover", "bound", "--ell", "2", "--n", "4096", "--s", "64", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(doc["result"]["ell"], 2);
}

#[test]
fn budget_env_overrides_apply() {
    let out = Command::new(env!("CARGO_BIN_EXE_addcomb"))
        .args(["cayley", "alpha", "--factors", "40", "--p", "0.2", "--method", "exact"])
        .env("ADDCOMB_EXACT_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_addcomb"))
        .args(["nonsumset", "f", "--max-n", "4"])
        .env("ADDCOMB_ATLAS_CAP", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_subcommand_runs() {
    for args in [
        vec!["fourier", "--factors", "8,8", "--eta", "0.25"],
        vec!["fourier", "--factors", "64", "--format", "csv"],
        vec!["cayley", "sample", "--factors", "3,9", "--p", "0.3"],
        vec!["cayley", "scan", "--orders", "16,24", "--ps", "0.1,0.3", "--trials", "3"],
        vec!["cayley", "bound", "--n", "1000000", "--p", "0.01", "--s", "1e7"],
        vec!["nonsumset", "search", "--factors", "16", "--p", "0.25"],
        vec!["nonsumset", "search", "--n", "18", "--p", "0.3", "--seed", "9"],
        vec!["nonsumset", "f", "--n", "17"],
        vec!["nonsumset", "f", "--factors", "2,2,2"],
        vec!["ap", "scan", "--p", "101", "--trials", "4", "--interval-n", "40"],
    ] {
        let out = addcomb(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
