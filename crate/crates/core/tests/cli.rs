use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sft-perturb"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn forbid_prints_canonical_polynomials() {
    let full = data("full2.txt");
    let o = run(&["forbid", full.to_str().unwrap(), "-k", "2", "-w", "aaa", "-w", "bbb"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("X(t) = 1*t^4 - 1*t^2 - 2*t - 1"), "{text}");
    assert!(text.contains("Delta(t) = 1*t^2 + 2*t + 1"));
    assert!(text.contains("M(t) = 2*t^2 - 1"));
    assert!(text.contains("m = 0"));
    assert!(text.contains("lambda1 = 1.618033988"));
}

#[test]
fn golden_entropy_and_validation() {
    let golden = data("golden.txt");
    let o = run(&["validate", golden.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("irreducible: true"));
    let o = run(&["entropy", golden.to_str().unwrap()]);
    assert!(stdout(&o).contains("entropy: 0.481211825"));
}

#[test]
fn classify_lists_support_conditions() {
    let full = data("full2.txt");
    let o = run(&["classify", full.to_str().unwrap(), "-w", "bbba", "-w", "bbbb"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("case: A"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "symbols: a b\n1 2\n1 1\n").unwrap();
    assert_eq!(run(&["validate", bad.to_str().unwrap()]).status.code(), Some(1));
    let full = data("full2.txt");
    assert_eq!(run(&["forbid", full.to_str().unwrap(), "-k", "2", "-w", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["forbid", full.to_str().unwrap(), "-k", "3", "-w", "aaa"]).status.code(), Some(1));
    assert_eq!(run(&["validate", "/nonexistent/shift.txt"]).status.code(), Some(1));
}

#[test]
fn verify_and_scan_succeed() {
    let golden = data("golden.txt");
    let o = run(&["verify", golden.to_str().unwrap(), "--kmax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = run(&[
        "scan",
        golden.to_str().unwrap(),
        "--mode",
        "one",
        "--kmin",
        "2",
        "--kmax",
        "5",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("k,w1,w2,case,d1,d2,delta,lambda0,lambda1,diff,scaled_one,scaled_two\n"));
    assert!(dir.path().join("scan.csv.meta.json").exists());
}
