use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn weakval(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakval"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn body(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .split("\r\n")
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn aav_weak_value_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = weakval(dir.path(), &["scenario", "run", "aav-sigma", "--out", "aav.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = body(&dir.path().join("aav.csv"));
    assert_eq!(rows, ["re,im", "0.0000000000000000e0,1.0000000000000000e0"]);
}

#[test]
fn kaon_toy_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let out = weakval(dir.path(), &["kaon-toy", "--epsilon", "0.1", "--out", "k.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    for row in &body(&dir.path().join("k.csv"))[1..] {
        let fidelity: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((fidelity - 1.00504).abs() < 1e-5);
    }
}

#[test]
fn degenerate_hamiltonian_exits_with_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = weakval(
        dir.path(),
        &["protective", "--hamiltonian", "identity", "--observable", "sigma_z", "--pre", "up_z", "--delta", "1", "--T", "10"],
    );
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("DegenerateSpectrum"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
    assert!(!dir.path().join("protective.csv").exists());
}

#[test]
fn validation_and_parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = weakval(dir.path(), &["postselect", "--pre", "up_x", "--post", "up_y", "--observable", "sigma_z"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`delta`"));

    fs::write(dir.path().join("bad.json"), "{\n  \"kind\": \"weakvalue\",\n  \"pre_state\": \n}").unwrap();
    let out = weakval(dir.path(), &["scenario", "run", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ParseError at line 4"), "{}", stderr(&out));

    fs::write(dir.path().join("extra.json"), r#"{"kind": "kaon-toy", "epsilon": 0.1, "colour": 1}"#).unwrap();
    let out = weakval(dir.path(), &["scenario", "run", "extra.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("colour"));
}

#[test]
fn scenario_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"kind": "weakvalue", "pre_state": [[1, 0], [1, 0]], "post_state": "up_y",
                  "observable": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "output": "w.csv"}"#;
    fs::write(dir.path().join("w.json"), cfg).unwrap();
    let out = weakval(dir.path(), &["scenario", "run", "w.json", "--observable", "sigma_x"]);
    assert!(out.status.success(), "{}", stderr(&out));
    // σ_x on |↑_x⟩ is 1 whatever the post-selection
    assert_eq!(body(&dir.path().join("w.csv"))[1], "1.0000000000000000e0,0.0000000000000000e0");
}

#[test]
fn listing_has_seven_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = weakval(dir.path(), &["scenario", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.contains("spin-protection"));
}

#[test]
fn serial_and_parallel_files_are_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["impulsive", "--pre", "up_x", "--observable", "sigma_z", "--delta", "0.3", "--samples", "2000",
        "--seed", "5", "--out", "run.csv"];
    assert!(weakval(a.path(), &args).status.success());
    let mut serial = args.to_vec();
    serial.push("--serial");
    assert!(weakval(b.path(), &serial).status.success());
    for name in ["run.csv", "run_summary.csv", "run_histogram.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}
