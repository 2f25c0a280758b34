//! End-to-end runs of the `sectorium` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sectorium(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sectorium")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validate_bundled_group_and_irreps() {
    let out = sectorium(&["validate-group", "d8star"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["data"]["center"], serde_json::json!(["1", "-1"]));

    let out = sectorium(&["validate-irreps", "--group", "s3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["data"]["dims"], serde_json::json!([1, 1, 2]));
    assert_eq!(v["data"]["conjugate_partners"], serde_json::json!([0, 1, 2]));
}

#[test]
fn broken_table_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"name": "bad", "order": 3, "elements": ["a", "b", "c"], "identity": 0,
                  "table": [[0, 1, 2], [1, 1, 0], [2, 0, 1]]}"#;
    let path = write(dir.path(), "bad.json", bad);
    let out = sectorium(&["validate-group", &path]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"], "NotLatinSquare");
    assert!(v["index"].is_u64());
    assert!(v["axis"].is_string());
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_group_and_bad_flags() {
    let out = sectorium(&["toy-model", "--group", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "UnknownGroup");
    assert_eq!(sectorium(&["rotor"]).status.code(), Some(2));
    assert_eq!(sectorium(&["rotor", "--lambda-max", "2", "--a", "1,0,1,0"]).status.code(), Some(2));
    assert_eq!(sectorium(&["--help"]).status.code(), Some(0));
}

#[test]
fn toy_model_reports_truncation() {
    let out = sectorium(&["toy-model", "--group", "d8star"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["data"]["commutant_dims"]["full"], 8);
    assert_eq!(v["data"]["commutant_dims"]["truncated"], 5);
    assert_eq!(v["data"]["wightman"]["full"], false);
    assert_eq!(v["data"]["wightman"]["truncated"], true);
}

#[test]
fn decompose_labelled_element() {
    let dir = tempfile::tempdir().unwrap();
    let el = write(dir.path(), "el.json", r#"{"coefficients": {"e": [1.0, 0.0], "(012)": [1.0, 0.0], "(021)": [1.0, 0.0]}}"#);
    let out = sectorium(&["decompose", "--group", "s3", "--element", &el]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    // 1 + r + r^2 lives in the two one-dimensional sectors only
    assert_eq!(v["data"]["rank_one"]["nonzero_sectors"], serde_json::json!([0, 1]));
    assert_eq!(v["data"]["subalgebra_dims"]["center"], 3);
}

#[test]
fn cover_spec_runs_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "cover.json",
        r#"{"base_size": 3, "group": "s3", "edges": [
            {"from": 0, "to": 1, "voltage": "(01)"},
            {"from": 1, "to": 2, "voltage": "(012)"},
            {"from": 2, "to": 0, "voltage": "e"}]}"#,
    );
    let out = sectorium(&["cover", &spec]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["data"]["projector_ranks"], serde_json::json!([3, 3, 6]));
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"holonomy_anti_homomorphism") && names.contains(&"time_reversal"));

    let out = sectorium(&["cover", &spec, "--check", "gauge,holonomy"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["data"]["gauge_group"], serde_json::json!(["e"]));

    let bad = write(dir.path(), "bad.json", r#"{"base_size": 2, "group": "s3", "edges": [{"from": 0, "to": 5, "voltage": "e"}]}"#);
    assert_eq!(sectorium(&["cover", &bad]).status.code(), Some(2));
}

#[test]
fn rotor_rows() {
    let out = sectorium(&["rotor", "--lambda-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["data"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let d = row["two_lambda"].as_u64().unwrap() + 1;
        assert_eq!(row["row_sum"].as_u64().unwrap(), d * d);
    }
    assert_eq!(rows[3]["spinor_family_size"], 8);
}

#[test]
fn output_is_deterministic_and_mirrored() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.json");
    let a = sectorium(&["validate-irreps", "q8", "--json", file.to_str().unwrap()]);
    let b = sectorium(&["validate-irreps", "q8"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&file).unwrap(), a.stdout);
    let timed = json(&sectorium(&["validate-irreps", "q8", "--timing"]));
    assert!(timed["wall_time_s"].is_f64());
    assert!(json(&b).get("wall_time_s").is_none());
}

#[test]
fn fixture_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let trivial = r#"{"name": "z1", "order": 1, "elements": ["x"], "identity": 0, "table": [[0]]}"#;
    write(dir.path(), "z1.group.json", trivial);
    write(
        dir.path(),
        "z1.irreps.json",
        r#"{"group": "z1", "irreps": [{"label": "one", "dim": 1, "matrices": {"x": [[[1.0, 0.0]]]}}]}"#,
    );
    let out = Command::new(env!("CARGO_BIN_EXE_sectorium"))
        .args(["validate-irreps", "z1"])
        .env("SECTORIUM_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["data"]["labels"], serde_json::json!(["one"]));
}

#[test]
fn tight_tolerance_fails_with_code_one() {
    let out = sectorium(&["--tol", "1e-30", "validate-irreps", "s3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "fail");
}
