//! End-to-end tests of the pg3 binary: output schemas, exit codes,
//! reproducibility of seeded commands.

use std::process::{Command, Output};

fn pg3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pg3"))
        .args(args)
        .env_remove("PG3_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

const DIAG_1123: &str = "[[1,0,0,0],[0,1,0,0],[0,0,2,0],[0,0,0,3]]";
const IDENTITY: &str = "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]";
const SPAN_1_I: &str = r#"{"span_points": [[1,0,0,0],[0,1,0,0]]}"#;
const SPAN_J_K: &str = r#"{"span_points": [[0,0,1,0],[0,0,0,1]]}"#;
const SPAN_1_J: &str = r#"{"span_points": [[1,0,0,0],[0,0,1,0]]}"#;
// complex Jordan block, a = i, b = 1
const A2_CANONICAL: &str = "[[0,-1,1,0],[1,0,0,1],[0,0,0,-1],[0,0,1,0]]";
// left multiplication by the unit quaternion j
const LEFT_BY_J: &str = "[[0,0,-1,0],[0,0,0,1],[1,0,0,0],[0,-1,0,0]]";

#[test]
fn classify_b1_diagonal() {
    let out = pg3(&["classify", DIAG_1123]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["label"], "B1");
    assert_eq!(v["automorphism"], "Excluded");
    assert_eq!(v["proposition"], "4.3");
    assert_eq!(v["compactness"], "NonCompact");
}

#[test]
fn classify_identity_is_trivial() {
    let out = pg3(&["classify", IDENTITY]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["label"], "Trivial");
    assert_eq!(v["compactness"], "CompactClosure");
    assert_eq!(v["automorphism"], "Possible");
}

#[test]
fn classify_singular_exits_3() {
    let out = pg3(&["classify", "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,0]]"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ill_conditioned_classification_exits_4() {
    // nearly defective pair: both the split and the merged reading validate
    let out = pg3(&[
        "classify",
        "[[1,1,0,0],[0,1.00005,0,0],[0,0,2,0],[0,0,0,3]]",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ill-conditioned"), "stderr: {err}");
}

#[test]
fn malformed_json_exits_2() {
    let out = pg3(&["classify", "[[1,2],[3]]"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pg3(&["falsify", "not-a-file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn clifford_parallel_example() {
    // parallel to span(1,i) through <j> is span(j,k): plucker (0,0,0,1,0,0)
    let out = pg3(&[
        "clifford",
        "parallel",
        "--point",
        "[0,0,1,0]",
        "--line",
        SPAN_1_I,
        "--side",
        "left",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let plucker: Vec<f64> = serde_json::from_value(v["plucker"].clone()).unwrap();
    let expected = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    for (got, want) in plucker.iter().zip(expected) {
        assert!((got - want).abs() < 1e-12, "plucker {plucker:?}");
    }
}

#[test]
fn clifford_check_and_class() {
    let out = pg3(&["clifford", "check", "--line", SPAN_1_I, "--other", SPAN_J_K]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out), serde_json::json!(true));

    let out = pg3(&["clifford", "check", "--line", SPAN_1_I, "--other", SPAN_1_J]);
    assert_eq!(stdout_json(&out), serde_json::json!(false));

    let out = pg3(&["clifford", "class", "--line", SPAN_1_I, "--side", "left"]);
    let v = stdout_json(&out);
    let axis: Vec<f64> = serde_json::from_value(v["axis"].clone()).unwrap();
    assert!((axis[0].abs() - 1.0).abs() < 1e-12);
    assert!(axis[1].abs() < 1e-12 && axis[2].abs() < 1e-12);
}

#[test]
fn falsify_a2_writes_witness_and_trace() {
    let dir = std::env::temp_dir().join("pg3-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let witness = dir.join("witness.json");
    let trace = dir.join("trace.csv");
    let out = pg3(&[
        "falsify",
        A2_CANONICAL,
        "--witness-out",
        witness.to_str().unwrap(),
        "--trace-out",
        trace.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["certificate"], "Limit");
    assert_eq!(v["case_label"], "A2");
    let residuals: Vec<f64> = serde_json::from_value(v["meet_residuals"].clone()).unwrap();
    assert!(residuals[0] < 1e-6 && residuals[1] < 1e-6);
    assert!(v["pair_defect"].as_f64().unwrap() < 1e-6);

    let witness_file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&witness).unwrap()).unwrap();
    assert_eq!(witness_file["case_label"], "A2");
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,n,distance_to_limit,class_defect"));
    assert!(lines.count() >= 3);
}

#[test]
fn falsify_automorphism_exits_6_with_defect_report() {
    let out = pg3(&["falsify", LEFT_BY_J]);
    assert_eq!(out.status.code(), Some(6));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "possible");
    assert!(v["invariance_defect"].as_f64().unwrap() < 1e-9);
}

#[test]
fn dynamics_trace_csv_schema() {
    let out = pg3(&[
        "dynamics", "trace", "--matrix", IDENTITY, "--line", SPAN_1_I, "--count", "8",
    ]);
    assert!(out.status.success());
    // traces default to CSV
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,n,distance_to_limit,class_defect"));
    assert_eq!(lines.count(), 8);

    let out = pg3(&[
        "dynamics", "trace", "--matrix", IDENTITY, "--line", SPAN_1_I, "--count", "8", "--format",
        "json",
    ]);
    let v = stdout_json(&out);
    assert!(v["limit"].is_object(), "constant orbit settles");
    assert_eq!(v["records"].as_array().unwrap().len(), 8);
}

#[test]
fn lemma_commands_roundtrip() {
    let out = pg3(&[
        "lemma",
        "avoid",
        "--line",
        SPAN_1_I,
        "--obstacles",
        r#"[{"span_points": [[1,0,0,0],[0,0,1,0]]}]"#,
    ]);
    assert!(out.status.success());
    let avoid = stdout_json(&out);
    assert!(avoid["plucker"].is_array());

    let out = pg3(&[
        "lemma",
        "transversals",
        "--line",
        SPAN_1_I,
        "--other",
        r#"{"span_points": [[0,0,1,0],[1,0,0,1]]}"#,
        "--grid",
        "64",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert!(v["invariant_defect"].as_f64().unwrap() < 1e-6);

    let out = pg3(&[
        "lemma",
        "pencil",
        "--matrix",
        IDENTITY,
        "--point-p",
        "[1,0,0,0]",
        "--point-q",
        "[0,1,0,0]",
        "--samples",
        "20",
    ]);
    assert!(out.status.success());
    assert!(stdout_json(&out)["defect"].as_f64().unwrap() < 1e-12);
}

#[test]
fn seeded_commands_are_reproducible() {
    let args = ["lemma", "avoid", "--line", SPAN_1_I, "--seed", "42"];
    let a = pg3(&args);
    let b = pg3(&args);
    assert_eq!(a.stdout, b.stdout, "same seed, same bytes");
    let c = pg3(&["lemma", "avoid", "--line", SPAN_1_I, "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout, "different seed, different parallel");
}

#[test]
fn config_env_is_honored() {
    let dir = std::env::temp_dir().join("pg3-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, r#"{"seed": 42}"#).unwrap();
    let with_env = Command::new(env!("CARGO_BIN_EXE_pg3"))
        .args(["lemma", "avoid", "--line", SPAN_1_I])
        .env("PG3_CONFIG", cfg.to_str().unwrap())
        .output()
        .expect("binary runs");
    let explicit = pg3(&["lemma", "avoid", "--line", SPAN_1_I, "--seed", "42"]);
    assert_eq!(with_env.stdout, explicit.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_pg3"))
        .args(["lemma", "avoid", "--line", SPAN_1_I])
        .env("PG3_CONFIG", dir.join("missing.json").to_str().unwrap())
        .output()
        .expect("binary runs");
    assert_eq!(bad.status.code(), Some(2));
}
