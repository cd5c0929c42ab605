//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sft_perturb::charpoly::{bordered_det, perturbed_charpoly_one, perturbed_charpoly_two, BorderedMatrix};
use sft_perturb::higher_block::ForbidSet;
use sft_perturb::scan::{delta_bound_scan, floor_envelope, scan_bounds, ScanConfig, ScanMode, DEFAULT_BUDGET};
use sft_perturb::sft::SftSpec;
use sft_perturb::spectra::pf_eigenvalue;
use sft_perturb::verify::{verify_with, VerifyOptions, ORACLE};
use sft_perturb::{IntMatrix, IntPoly};

const ROOT_TOL: f64 = 1e-6;
const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn forbid(spec: &SftSpec, words: &[&str]) -> ForbidSet {
    ForbidSet::new(spec, words.iter().map(|w| spec.parse_word(w).unwrap()).collect()).unwrap()
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    match limit {
        Some(limit) => {
            let detail = format!("{}; {:.2?} (limit {:?})", out.detail, elapsed, limit);
            outcome(out.passed && elapsed < limit, detail)
        }
        None => outcome(out.passed, format!("{}; {:.2?}", out.detail, elapsed)),
    }
}

fn c1() -> Outcome {
    let full = SftSpec::full(2);
    let x = perturbed_charpoly_one(&full, 2, &full.parse_word("aaa").unwrap()).unwrap();
    let l = pf_eigenvalue(&x.x).unwrap().value;
    outcome((l - 1.839287).abs() <= ROOT_TOL, format!("lambda1 = {l:.9}"))
}

fn c2() -> Outcome {
    let full = SftSpec::full(2);
    let x = perturbed_charpoly_two(&full, 2, &forbid(&full, &["aaa", "bbb"])).unwrap();
    let l = pf_eigenvalue(&x.x).unwrap().value;
    let exact = x.x == IntPoly::from_i64s(&[-1, -2, -1, 0, 1]);
    outcome(exact && (l - 1.618034).abs() <= ROOT_TOL, format!("X = {}, lambda1 = {l:.9}", x.x))
}

fn c3() -> Outcome {
    let golden = SftSpec::golden_mean();
    let x = perturbed_charpoly_one(&golden, 2, &golden.parse_word("aaa").unwrap()).unwrap();
    let l = pf_eigenvalue(&x.x).unwrap().value;
    let exact = x.x == IntPoly::from_i64s(&[-1, -1, 0, 1]);
    outcome(exact && (l - 1.324718).abs() <= ROOT_TOL, format!("X = {}, lambda1 = {l:.9}", x.x))
}

fn c4() -> Outcome {
    let mut details = Vec::new();
    let mut passed = true;
    for (name, spec) in [("FULL2", SftSpec::full(2)), ("GOLDEN", SftSpec::golden_mean())] {
        let opts = VerifyOptions { word_k_max: 8, pair_k_max: 6, ..VerifyOptions::new(8) };
        let report = verify_with(&spec, &opts).unwrap();
        let t = report.tally(ORACLE).cloned().unwrap_or_default();
        passed &= t.checked > 0 && t.failed == 0;
        details.push(format!("{name}: {} instances, {} mismatches", t.checked, t.failed));
    }
    outcome(passed, details.join("; "))
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let ints = |n: usize, v: Vec<i64>| IntMatrix::from_fn(n, n, |i, j| BigInt::from(v[i * n + j]));
    let mut mismatches = 0;
    for _ in 0..200 {
        let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=3));
        let mut v = |len: usize| -> Vec<i64> { (0..len).map(|_| rng.random_range(-5..=5)).collect() };
        let a = ints(n, v(n * n));
        let b = ints(m, v(m * m));
        let cols = (0..m).map(|_| (rng.random_range(0..n), BigInt::from(rng.random_range(-3..=3)))).collect();
        let rows = (0..m).map(|_| (rng.random_range(0..n), BigInt::from(rng.random_range(-3..=3)))).collect();
        let bm = BorderedMatrix::new(a, b, cols, rows).unwrap();
        if bordered_det(&bm) != bm.to_full().det_cofactor() {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("200 matrices, {mismatches} mismatches"))
}

fn c6() -> Outcome {
    let mut details = Vec::new();
    let mut passed = true;
    for (name, spec) in [("FULL2", SftSpec::full(2)), ("GOLDEN", SftSpec::golden_mean())] {
        let opts = VerifyOptions { oracle: false, ..VerifyOptions::new(6) };
        let report = verify_with(&spec, &opts).unwrap();
        let checked: usize = report.tallies.values().map(|t| t.checked).sum();
        let failed: Vec<&str> = report.failed_checks().map(|(n, _)| n).collect();
        passed &= failed.is_empty();
        details.push(format!("{name}: {checked} checks, failing [{}]", failed.join(", ")));
    }
    outcome(passed, details.join("; "))
}

fn c7() -> Outcome {
    let full = SftSpec::full(2);
    let run = |mode| {
        let config = ScanConfig { mode, k_min: 4, k_max: 10, budget: DEFAULT_BUDGET, seed: SEED };
        scan_bounds(&full, &config).unwrap().meta
    };
    let one = run(ScanMode::OneWord);
    let two = run(ScanMode::TwoWord);
    let env = |m: &sft_perturb::scan::ScanMeta| m.envelope.as_ref().is_some_and(|e| e.holds);
    let threshold_ok = one.rho_threshold.is_some_and(|k| k <= 10);
    let fmt_env = |m: &sft_perturb::scan::ScanMeta| match &m.envelope {
        Some(e) => format!("{:.4} -> {:.4}", e.early_max, e.late_max),
        None => "none".into(),
    };
    outcome(
        env(&one) && env(&two) && threshold_ok,
        format!(
            "one-word {}, two-word {}, rho threshold k = {:?} (two-word {:?})",
            fmt_env(&one),
            fmt_env(&two),
            one.rho_threshold,
            two.rho_threshold
        ),
    )
}

fn c8() -> Outcome {
    let floors = delta_bound_scan(&SftSpec::full(2), 1..=8).unwrap();
    let per_k: Vec<String> = floors.iter().map(|f| format!("k={}:{:.4}", f.k, f.min_ratio)).collect();
    match floor_envelope(&floors, 2..=5, 5..=8) {
        Some(e) => outcome(
            e.holds,
            format!("floors [{}]; early min {:.4}, late min {:.4}", per_k.join(" "), e.early_max, e.late_max),
        ),
        None => outcome(false, "no floors computed".into()),
    }
}

fn c9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let shift = dir.path().join("full2.txt");
    std::fs::write(&shift, SftSpec::full(2).to_string()).unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_sft-perturb"))
            .args(["scan", shift.to_str().unwrap(), "--mode", "two", "--kmin", "4", "--kmax", "8"])
            .args(["--budget", "10000", "--seed", &SEED.to_string(), "--out", out.to_str().unwrap()])
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    outcome(a == b && !a.is_empty(), format!("{} bytes, identical = {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("FULL2 forbid aaa", Some(Duration::from_secs(1)), c1),
        ("FULL2 forbid aaa, bbb", Some(Duration::from_secs(1)), c2),
        ("GOLDEN forbid aaa", Some(Duration::from_secs(1)), c3),
        ("oracle equivalence", Some(Duration::from_secs(600)), c4),
        ("bordered determinant expansion", Some(Duration::from_secs(10)), c5),
        ("structural suite k <= 6", None, c6),
        ("bound envelopes", None, c7),
        ("delta floor envelope", Some(Duration::from_secs(300)), c8),
        ("scan determinism", None, c9),
    ];
    let mut failures = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let out = timed(limit, f);
        println!("{} {}: {}: {}", if out.passed { "PASS" } else { "FAIL" }, i + 1, name, out.detail);
        failures += usize::from(!out.passed);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
