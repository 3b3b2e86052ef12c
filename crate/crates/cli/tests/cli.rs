use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn roelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roelab")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("roelab-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn cohomology_csv_of_the_line() {
    let out = roelab(&["cohomology", "--space", "z", "--scales", "1..2", "--degrees", "0..2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("backend,degree,scale,window,core_radius,rank,torsion,stabilized"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().filter(|r| r[1] == "1").all(|r| r[5] == "1"));
    assert!(rows.iter().filter(|r| r[1] != "1").all(|r| r[5] == "0"));
}

#[test]
fn space_file_and_both_backends() {
    let path = scratch("square.json");
    fs::write(&path, r#"{"kind": "finite", "params": {"dist": [[0,1,2,1],[1,0,1,2],[2,1,0,1],[1,2,1,0]]}, "core_radius": 5}"#)
        .unwrap();
    let out = roelab(&["cohomology", "--space", path.to_str().unwrap(), "--scales", "2..3", "--backend", "both"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("alternating: H^0 = Z") && err.contains("ordered: H^0 = Z"), "{err}");
}

#[test]
fn malformed_input_reports_field() {
    let path = scratch("bad.json");
    fs::write(&path, r#"{"kind": "grid", "params": {"d": "two"}}"#).unwrap();
    let out = roelab(&["cohomology", "--space", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("params.d"), "{err}");

    fs::write(&path, "{\"kind\": \"grid\",\n \"core_radius\": \"x\"}").unwrap();
    let out = roelab(&["cohomology", "--space", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("core_radius") && err.contains("line 2"), "{err}");

    let out = roelab(&["cohomology", "--space", "no-such-space"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn single_scale_is_flagged_unstable() {
    let out = roelab(&["cohomology", "--space", "z", "--scales", "1", "--degrees", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_prints_pass_lines() {
    let out = roelab(&["verify", "pairing", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("PASS pairing"), "{text}");
}

#[test]
fn reports_are_reproducible() {
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    for p in [&a, &b] {
        let out = roelab(&["pair", "--space", "z", "--seed", "11", "--backend", "both", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let json: serde_json::Value = serde_json::from_slice(&text).unwrap();
    assert_eq!(json[0]["seed"], 11);
    assert_eq!(json[0]["value"], "1");
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_roelab"))
        .args(["verify", "mv"])
        .env("ROE_LAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_roelab"))
        .args(["verify", "mv"])
        .env("ROE_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
