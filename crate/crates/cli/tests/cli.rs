use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kdiam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdiam"))
        .args(args)
        .output()
        .expect("kdiam runs")
}

fn write_space(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

const LAMBDA1: &str = "label = \"Lambda_1(n)\"\ntype = \"lambda1\"\nalpha = \"n\"\n";
const LAMBDAINF: &str = "label = \"Lambda_inf(n)\"\ntype = \"lambdainf\"\nalpha = \"n\"\n";

#[test]
fn diam_prints_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_space(dir.path(), "l1.toml", LAMBDA1);
    let out = kdiam(&["diam", "--space", &s, "--p", "1", "--q", "2", "--n", "16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17, "{text}");
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[1].parse::<f64>().unwrap(), 1.0);
    // d_n = e^{-n/2} on Lambda_1(n) between grades 1 and 2.
    let last: Vec<&str> = lines[16].split(',').collect();
    let d: f64 = last[1].parse().unwrap();
    assert!((d.ln() + 7.5).abs() < 1e-9, "{d}");
}

#[test]
fn diam_rejects_bad_grades_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_space(dir.path(), "l1.toml", LAMBDA1);
    assert_eq!(
        kdiam(&["diam", "--space", &s, "--p", "2", "--q", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        kdiam(&["diam", "--space", &s, "--p", "0", "--q", "2"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.toml");
    let out = kdiam(&[
        "diam",
        "--space",
        missing.to_str().unwrap(),
        "--p",
        "1",
        "--q",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let bad = write_space(
        dir.path(),
        "bad.toml",
        "type = \"lambda1\"\nalpha = \"n +\"\n",
    );
    assert_eq!(
        kdiam(&["diam", "--space", &bad, "--p", "1", "--q", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn invalid_matrix_is_a_math_error() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_space(
        dir.path(),
        "t.toml",
        "type = \"table\"\ngrades = [\"exp(n)\", \"1\"]\n",
    );
    let out = kdiam(&["diam", "--space", &s, "--p", "1", "--q", "2"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn member_reports_delta_of_infinite_type() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_space(dir.path(), "linf.toml", LAMBDAINF);
    let out = kdiam(&["member", "--space", &s, "--set", "Delta", "--t", "exp(3*n)"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["verdict"]["outcome"], "holds");
    let out = kdiam(&["member", "--space", &s, "--set", "delta", "--t", "exp(3*n)"]);
    assert_eq!(json(&out)["verdict"]["outcome"], "fails");
    assert_eq!(
        kdiam(&["member", "--space", &s, "--set", "nope", "--t", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn criteria_reports_exact_finite_value() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_space(dir.path(), "l1.toml", LAMBDA1);
    let out = kdiam(&[
        "criteria",
        "--space",
        &s,
        "--criterion",
        "finite_delta_coincidence",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["reports"][0]["value"]["rational"], "1/66");
    assert_eq!(v["reports"][0]["value"]["mode"], "exact");
    let out = kdiam(&["criteria", "--space", &s, "--criterion", "no_such"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat");
    let out = kdiam(&[
        "export",
        "--catalog",
        "default",
        "--dir",
        cat.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mut files: Vec<_> = fs::read_dir(&cat)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert_eq!(files.len(), 9);
    for f in &files {
        let again = kdiam(&["export", "--space", f.to_str().unwrap()]);
        assert!(again.status.success(), "{}", f.display());
        assert_eq!(
            String::from_utf8(again.stdout).unwrap(),
            fs::read_to_string(f).unwrap()
        );
    }
}

#[test]
fn verify_single_theorem_on_directory() {
    let dir = tempfile::tempdir().unwrap();
    write_space(dir.path(), "linf.toml", LAMBDAINF);
    let out = kdiam(&[
        "verify",
        "--theorem",
        "T3.1",
        "--catalog",
        dir.path().to_str().unwrap(),
        "--n",
        "1024",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["campaigns"][0]["rows"][0]["agreement"], "agree");
    assert_eq!(v["summary"]["violated"], 0);
}

#[test]
fn verify_rejects_unknown_theorem() {
    assert_eq!(
        kdiam(&["verify", "--theorem", "T9.9"]).status.code(),
        Some(2)
    );
}
