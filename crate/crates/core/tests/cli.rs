use std::process::{Command, Output};

fn quadbct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadbct"))
        .args(args)
        .output()
        .expect("run quadbct")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn field_info() {
    let out = quadbct(&["field-info", "--m", "3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["n"], 6);
    assert_eq!(v["modulus_hex"], "43");
}

#[test]
fn invalid_parameters_exit_2() {
    let out = quadbct(&["field-info", "--m", "3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k' = m - k"));
    assert!(out.stdout.is_empty());
    assert_eq!(quadbct(&["field-info", "--m", "4", "--k", "1"]).status.code(), Some(2));
    assert_eq!(quadbct(&["classify", "--m", "3", "--k", "1", "--c", "1:2:3"]).status.code(), Some(2));
    assert_eq!(quadbct(&["classify", "--m", "3", "--k", "1", "--c", "0:0:0:ff"]).status.code(), Some(2));
    assert_eq!(quadbct(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn classify_examples() {
    let out = quadbct(&["classify", "--m", "3", "--k", "1", "--c", "0:1:0:0"]);
    assert_eq!(stdout_json(&out)["verdict"], "Gamma0");
    let out = quadbct(&["classify", "--m", "3", "--k", "1", "--c", "1:0:0:0"]);
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "NotGamma");
    assert_eq!(v["reasons"], serde_json::json!(["trace_theta4"]));
}

#[test]
fn analyze_monomial() {
    let out = quadbct(&["analyze", "--m", "3", "--k", "1", "--c", "0:1:0:0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["permutation"], true);
    assert_eq!(v["delta"], 4);
    assert_eq!(v["beta"], 4);
    assert_eq!(v["consistent"], true);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1);
}

#[test]
fn analyze_full_tables_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    let out = quadbct(&[
        "analyze", "--m", "3", "--k", "1", "--c", "0:1:0:0", "--full-tables", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    assert_eq!(v["bct_table"].as_array().unwrap().len(), 64);
    assert_eq!(v["ddt_table"][0][0], 64);
}

#[test]
fn analyze_not_gamma_is_observed_only() {
    let out = quadbct(&["analyze", "--m", "3", "--k", "1", "--c", "1:0:0:0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "NotGamma");
    assert_eq!(v["consistent"], true);
}

#[test]
fn verify_suites() {
    let out = quadbct(&["verify", "--suite", "lemma-core", "--m", "3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["checked"], 4096);
    assert_eq!(v["failed"], 0);
    let out = quadbct(&["verify", "--suite", "vi", "--m", "5", "--k", "3", "--seed", "7", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["tags"]["closed_forms"]["passed"], 500);
    let out = quadbct(&["verify", "--suite", "identities", "--m", "3", "--k", "1", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn search_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = quadbct(&[
            "--threads", threads, "search", "--m", "3", "--k", "1", "--samples", "300", "--seed",
            "5", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        (out.stdout, std::fs::read(path).unwrap())
    };
    let (s1, r1) = run("a.jsonl", "1");
    let (s2, r2) = run("b.jsonl", "3");
    assert_eq!(s1, s2);
    assert_eq!(r1, r2);
    assert_eq!(String::from_utf8(r1).unwrap().lines().count(), 300);
}

#[test]
fn search_requires_a_mode() {
    assert_eq!(quadbct(&["search", "--m", "3", "--k", "1"]).status.code(), Some(2));
    let out = quadbct(&["search", "--m", "5", "--k", "1", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn baselines() {
    for args in [
        &["baseline", "--family", "gold", "--m", "3", "--t", "2"][..],
        &["baseline", "--family", "gold", "--m", "3", "--t", "4"][..],
        &["baseline", "--family", "inverse", "--m", "3"][..],
    ] {
        let out = quadbct(args);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout_json(&out)["beta"], 4);
    }
    let out = quadbct(&["baseline", "--family", "gold", "--m", "3", "--t", "3"]);
    assert_eq!(out.status.code(), Some(2));
}
