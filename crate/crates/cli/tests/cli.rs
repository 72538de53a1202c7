use std::process::{Command, Output};

fn sidewise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sidewise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("error line");
    serde_json::from_str(line).expect("error is one JSON line")
}

#[test]
fn missing_scenario_file_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    let out_dir = dir.path().join("out");
    let out = sidewise(&[
        "sgcc",
        "--scenario",
        missing.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "configuration");
}

#[test]
fn unknown_key_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "name = \"x\"\nbogus = 1\n").unwrap();
    let out = sidewise(&["sgcc", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_preset_is_a_configuration_error() {
    let out = sidewise(&["--preset", "torus", "sgcc"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn disc_gate_exits_with_negative_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = sidewise(&["--preset", "disc", "sgcc", "--gate", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "verdict-negative");
    assert!(out_dir.join("sgcc.json").exists());
    assert!(out_dir.join("certificate.txt").exists());
}

#[test]
fn disc_without_gate_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = sidewise(&["--preset", "disc", "sgcc", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn annulus_sgcc_writes_a_verified_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = sidewise(&["sgcc", "--gate", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("sgcc.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "VERIFIED_ON_SAMPLES");
}

#[test]
fn rays_and_classify_write_their_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(
        sidewise(&["rays", "--points", "3", "--angles", "2", "--out", d])
            .status
            .code(),
        Some(0)
    );
    assert!(dir.path().join("rays.svg").exists());
    let out = sidewise(&["classify", "--format", "csv", "--out", d]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("classify.csv")).unwrap();
    assert!(csv.starts_with("region,curve,s,tau"));
    assert!(csv.contains("Hyperbolic") && csv.contains("Elliptic"));
}

#[test]
fn observe_reports_a_positive_quotient() {
    let dir = tempfile::tempdir().unwrap();
    let out = sidewise(&["observe", "--source", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("quotient.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["quotient"].as_f64().unwrap() > 0.0);
    let bad = sidewise(&["observe", "--source", "99", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}
