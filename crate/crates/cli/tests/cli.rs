use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gufactor"))
        .args(args)
        .output()
        .expect("spawn gufactor")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn demo_files(dir: &Path) {
    let out = run(&["demo", "--out-dir", path(dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn factor_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    demo_files(dir.path());
    let inst = dir.path().join("instance.json");
    let cert = dir.path().join("cert.json");
    let report = dir.path().join("report.json");
    let out = run(&[
        "factor",
        path(&inst),
        "--out",
        path(&cert),
        "--json-out",
        path(&report),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("det(h1) = -1"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["verification"]["passed"], Value::Bool(true));

    let out = run(&["verify", path(&inst), path(&cert)]);
    assert_eq!(code(&out), 0);
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn corrupted_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    demo_files(dir.path());
    let inst = dir.path().join("instance.json");
    let cert = dir.path().join("certificate.json");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let entry = &mut doc["h2"]["mat"][0][0][0];
    *entry = Value::from((entry.as_u64().unwrap() + 1) % 3);
    std::fs::write(&cert, doc.to_string()).unwrap();
    let out = run(&["verify", path(&inst), path(&cert)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn field_mismatch_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    demo_files(dir.path());
    let cert = dir.path().join("certificate.json");
    let other = dir.path().join("other.json");
    let listing = run(&[
        "enumerate",
        "--kind",
        "sp",
        "--n",
        "2",
        "--q",
        "5",
        "--sample",
        "1",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&listing), 0);
    let docs: Value = serde_json::from_str(&stdout(&listing)).unwrap();
    std::fs::write(&other, docs[0].to_string()).unwrap();
    let out = run(&["verify", path(&other), path(&cert)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("field mismatch"));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"field": {"p": 3}, "epsilon": 7, "gram": [], "g": []}"#,
    )
    .unwrap();
    let out = run(&["factor", path(&bad)]);
    assert_eq!(code(&out), 2);
    assert_eq!(
        code(&run(&["factor", path(&dir.path().join("missing.json"))])),
        2
    );
    assert_eq!(
        code(&run(&[
            "survey",
            "--kind",
            "sp",
            "--n",
            "2",
            "--q",
            "6",
            "--exhaustive"
        ])),
        2
    );
}

#[test]
fn survey_counts() {
    let out = run(&[
        "survey",
        "--kind",
        "sp",
        "--n",
        "2",
        "--q",
        "3",
        "--exhaustive",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("24/24 certified"));
    let out = run(&[
        "survey",
        "--kind",
        "u",
        "--n",
        "2",
        "--q",
        "2",
        "--exhaustive",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn survey_budget_exits_2() {
    let out = run(&[
        "survey",
        "--kind",
        "u",
        "--n",
        "4",
        "--q",
        "3",
        "--exhaustive",
        "--budget",
        "100",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds budget 100"));
}

#[test]
fn refined_survey_failure_dumps_element() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("fail.json");
    let out = run(&[
        "survey",
        "--kind",
        "go-minus",
        "--n",
        "2",
        "--q",
        "3",
        "--beta",
        "2",
        "--exhaustive",
        "--refined",
        "--json-out",
        path(&dump),
    ]);
    assert_eq!(code(&out), 1);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert!(doc["reason"].as_str().unwrap().contains("det(h1)"));
}

#[test]
fn sampling_is_seeded() {
    let args = [
        "survey", "--kind", "go-plus", "--n", "4", "--q", "3", "--sample", "30", "--seed", "9",
    ];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&run(&args)));
    assert_eq!(
        code(&run(&[
            "survey", "--kind", "sp", "--n", "2", "--q", "3", "--sample", "5"
        ])),
        2
    );
}
