//! End-to-end CLI checks: output shapes against the shipped schemas, exit
//! codes, file inputs, and convergence behavior.

use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_entmon"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

fn workspace_root() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

/// Minimal structural validator for the shipped JSON schemas: checks
/// `type`, `required`, per-property types, array `items`, and
/// `prefixItems`. Enough to catch shape drift.
fn validate(value: &Value, schema: &Value, path: &str) -> Result<(), String> {
    if let Some(types) = schema.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(|t| t.as_str()).collect(),
            _ => vec![],
        };
        let actual = match value {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(n) => {
                if n.is_i64() || n.is_u64() {
                    "integer"
                } else {
                    "number"
                }
            }
            Value::String(_) => "string",
            Value::Array(_) => "array",
            Value::Object(_) => "object",
        };
        let ok = allowed.iter().any(|&t| t == actual || (t == "number" && actual == "integer"));
        if !ok {
            return Err(format!("{path}: expected {allowed:?}, got {actual}"));
        }
    }
    if let Some(required) = schema.get("required").and_then(|r| r.as_array()) {
        for key in required.iter().filter_map(|k| k.as_str()) {
            if value.get(key).is_none() {
                return Err(format!("{path}: missing required key '{key}'"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(|p| p.as_object()) {
        for (key, sub) in props {
            if let Some(v) = value.get(key) {
                validate(v, sub, &format!("{path}.{key}"))?;
            }
        }
    }
    if let (Some(items), Some(array)) = (schema.get("items"), value.as_array()) {
        for (i, v) in array.iter().enumerate() {
            validate(v, items, &format!("{path}[{i}]"))?;
        }
    }
    if let (Some(prefix), Some(array)) = (
        schema.get("prefixItems").and_then(|p| p.as_array()),
        value.as_array(),
    ) {
        for (i, sub) in prefix.iter().enumerate() {
            if let Some(v) = array.get(i) {
                validate(v, sub, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn load_schema(name: &str) -> Value {
    let path = workspace_root().join("schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(&path).expect("schema file exists"))
        .expect("schema parses")
}

#[test]
fn compute_output_matches_schema() {
    let (stdout, _, code) = run(&[
        "compute",
        "--state",
        "ghz:2,3",
        "--alpha",
        "0.5,0.75",
        "--n-max",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let reports: Value = serde_json::from_str(&stdout).unwrap();
    let schema = load_schema("functional_report.schema.json");
    for (i, report) in reports.as_array().unwrap().iter().enumerate() {
        validate(report, &schema, &format!("report[{i}]")).unwrap();
    }
    // GHZ(2,3) with the uniform elementary mean: E interval contains 1.
    let first = &reports[0];
    let interval = first["E_interval"].as_array().unwrap();
    assert!(interval[0].as_f64().unwrap() <= 1.0 + 1e-9);
    assert!(interval[1].as_f64().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn verify_output_matches_schema() {
    let (stdout, _, code) = run(&[
        "verify",
        "--suite",
        "semiring,partitions",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let schema = load_schema("verify_report.schema.json");
    validate(&report, &schema, "verify").unwrap();
    assert_eq!(report["all_pass"], Value::Bool(true));
}

#[test]
fn convergence_gap_shrinks_for_two_qubit_state() {
    // √0.3|00⟩ + √0.7|11⟩ through an explicit-amplitude state file.
    let dir = std::env::temp_dir().join("entmon-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let state_path = dir.join("state37.json");
    let a = 0.3_f64.sqrt();
    let b = 0.7_f64.sqrt();
    std::fs::write(
        &state_path,
        format!(r#"{{"dims": [2, 2], "amplitudes": [[{a}, 0.0], [0.0, 0.0], [0.0, 0.0], [{b}, 0.0]]}}"#),
    )
    .unwrap();
    let (stdout, _, code) = run(&[
        "convergence",
        "--state",
        state_path.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--n-max",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let rows: Value = serde_json::from_str(&stdout).unwrap();
    let schema = load_schema("convergence.schema.json");
    validate(&rows, &schema, "rows").unwrap();
    let gaps: Vec<f64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["gap"].as_f64().unwrap())
        .collect();
    assert_eq!(gaps.len(), 6);
    for gap in &gaps {
        assert!(*gap >= 0.0);
    }
    for w in gaps.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "gap not shrinking: {gaps:?}");
    }

    // Single-row table at n_max = 1.
    let (stdout, _, code) = run(&[
        "convergence",
        "--state",
        state_path.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--n-max",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 2); // header + one row
}

#[test]
fn tree_file_input() {
    let dir = std::env::temp_dir().join("entmon-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let tree_path = dir.join("tree.json");
    std::fs::write(
        &tree_path,
        r#"{"t": 0.5, "left": {"leaf": "1|23"}, "right": {"t": 0.5, "left": {"leaf": "2|13"}, "right": {"leaf": "3|12"}}}"#,
    )
    .unwrap();
    let (stdout, _, code) = run(&[
        "compute",
        "--state",
        "ghz:2,3",
        "--alpha",
        "0.5",
        "--theta",
        tree_path.to_str().unwrap(),
        "--n-max",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0, "{stdout}");
    let reports: Value = serde_json::from_str(&stdout).unwrap();
    let theta = reports[0]["theta"].as_array().unwrap();
    assert_eq!(theta.len(), 3);
    assert!((theta[0][1].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((theta[1][1].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    // Malformed state → 2.
    let (_, _, code) = run(&["compute", "--state", "ghz:2"]);
    assert_eq!(code, 2);
    let (_, _, code) = run(&["compute", "--state", "nonsense"]);
    assert_eq!(code, 2);
    // Unknown / empty suite → 2.
    let (_, _, code) = run(&["verify", "--suite", "bogus"]);
    assert_eq!(code, 2);
    let (_, _, code) = run(&["verify", "--suite", ""]);
    assert_eq!(code, 2);
    // Cap violation → 3.
    let (_, _, code) = run(&["compute", "--state", "ghz:2,2", "--n-max", "50"]);
    assert_eq!(code, 3);
    // Fault injection makes verification fail → 1.
    let (_, _, code) = run(&[
        "verify",
        "--suite",
        "observables",
        "--inject-fault",
        "entropy-sign",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn unit_tensor_compute_contains_level() {
    let (stdout, _, code) = run(&[
        "compute",
        "--state",
        "unit:3,2",
        "--alpha",
        "0.5",
        "--n-max",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let reports: Value = serde_json::from_str(&stdout).unwrap();
    let f = reports[0]["F_interval"].as_array().unwrap();
    assert!(f[0].as_f64().unwrap() <= 3.0 + 1e-9);
    assert!(f[1].as_f64().unwrap() >= 3.0 - 1e-9);
}

#[test]
fn named_state_file_with_seed() {
    let dir = std::env::temp_dir().join("entmon-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("random.json");
    std::fs::write(
        &path,
        r#"{"name": "random", "params": {"dims": [2, 2]}, "seed": 99}"#,
    )
    .unwrap();
    let run_digest = || {
        let (stdout, _, code) = run(&[
            "compute",
            "--state",
            path.to_str().unwrap(),
            "--alpha",
            "0.5",
            "--bipartitions",
            "1|2",
            "--n-max",
            "2",
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&stdout).unwrap();
        v[0]["state_digest"].as_str().unwrap().to_string()
    };
    // The file-pinned seed wins over the CLI default, so runs agree.
    assert_eq!(run_digest(), run_digest());
}

#[test]
fn axiom_report_matches_schema() {
    use entmon::multilinear::{Bipartition, SpaceSpec};
    use entmon::observables::{verify_axioms, AxiomConfig, FamilySpec};
    let space = SpaceSpec::new(vec![2, 2]).unwrap();
    let spec = FamilySpec::bipartite(Bipartition::elementary(0, 2).unwrap());
    let cfg = AxiomConfig {
        m: 1,
        n: 1,
        alpha: 0.5,
        isometry_samples: 2,
        ..AxiomConfig::default()
    };
    let report = verify_axioms(&spec, &space, None, &cfg).unwrap();
    let value = serde_json::to_value(&report).unwrap();
    let schema = load_schema("axiom_report.schema.json");
    validate(&value, &schema, "axiom_report").unwrap();
    assert_eq!(value["all_pass"], Value::Bool(true));
}
