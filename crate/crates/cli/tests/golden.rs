//! Golden tests: classify / larc / control-set outputs must match the
//! committed files byte for byte across the six canonical configurations,
//! including the rejected paths. Set UPDATE_GOLDEN=1 to regenerate.

use std::path::{Path, PathBuf};
use std::process::Command;

const CASES: [&str; 6] = [
    "flat",
    "contracting",
    "band",
    "quadratic",
    "reducible",
    "nonsingular",
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

struct Captured {
    stdout: String,
    stderr: String,
    code: i32,
}

fn run(args: &[&str]) -> Captured {
    let out = Command::new(env!("CARGO_BIN_EXE_hlcs"))
        .args(args)
        .output()
        .expect("binary runs");
    Captured {
        stdout: String::from_utf8(out.stdout).expect("utf8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf8 stderr"),
        code: out.status.code().unwrap_or(-1),
    }
}

fn check(name: &str, kind: &str, got: &str) {
    let path = golden_dir().join(format!("{name}.{kind}.txt"));
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        std::fs::write(&path, got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "golden mismatch for {name}.{kind}");
}

#[test]
fn golden_classify_and_larc() {
    for name in CASES {
        let cfg = golden_dir().join(format!("{name}.json"));
        let cfg = cfg.to_str().unwrap();

        let r = run(&["classify", "--config", cfg]);
        assert_eq!(r.code, 0, "classify must succeed for {name}: {}", r.stderr);
        check(name, "classify", &r.stdout);

        let r = run(&["larc", "--config", cfg]);
        assert_eq!(r.code, 0, "larc must succeed for {name}: {}", r.stderr);
        check(name, "larc", &r.stdout);
    }
    println!("[PASS] criterion 9a: classify and larc outputs byte-identical for {} configs", CASES.len());
}

#[test]
fn golden_control_set() {
    let tmp = tempfile::tempdir().unwrap();
    for name in CASES {
        let cfg = golden_dir().join(format!("{name}.json"));
        let cfg = cfg.to_str().unwrap();
        let out = tmp.path().join(name);
        let r = run(&["control-set", "--config", cfg, "--out", out.to_str().unwrap()]);
        if name == "nonsingular" {
            assert_eq!(r.code, 1, "the non-degenerate case must be rejected");
            check(name, "controlset.err", &r.stderr);
        } else {
            assert_eq!(r.code, 0, "control-set must succeed for {name}: {}", r.stderr);
            check(name, "controlset", &r.stdout);
            assert!(out.join("control_set_raster.csv").exists());
        }
    }
    println!("[PASS] criterion 9b: control-set outputs byte-identical, including the rejected path");
}

#[test]
fn golden_outputs_are_deterministic_across_runs() {
    let cfg = golden_dir().join("contracting.json");
    let cfg = cfg.to_str().unwrap();
    let a = run(&["classify", "--config", cfg]);
    let b = run(&["classify", "--config", cfg]);
    assert_eq!(a.stdout, b.stdout);

    let tmp = tempfile::tempdir().unwrap();
    let out1 = tmp.path().join("r1");
    let out2 = tmp.path().join("r2");
    for (out, threads) in [(&out1, "1"), (&out2, "4")] {
        let r = Command::new(env!("CARGO_BIN_EXE_hlcs"))
            .args([
                "reach",
                "--config",
                cfg,
                "--out",
                out.to_str().unwrap(),
                "--window",
                "-2,2,-2,2",
                "--grid-h",
                "0.1",
            ])
            .env("HLCS_THREADS", threads)
            .output()
            .unwrap();
        assert!(r.status.success());
    }
    let e1 = std::fs::read(out1.join("edges.csv")).unwrap();
    let e2 = std::fs::read(out2.join("edges.csv")).unwrap();
    assert_eq!(e1, e2, "reach output must not depend on the thread count");
}

#[test]
fn error_paths_are_single_line_machine_readable() {
    let tmp = tempfile::tempdir().unwrap();

    // constraint violation: both quadratic and linear drift terms set
    let bad = tmp.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"a":0,"b":1,"c":0,"alpha":1,"beta":0,"gamma":1,"lambda":0,"omega_minus":-1,"omega_plus":1}"#,
    )
    .unwrap();
    let r = run(&["classify", "--config", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[ConstraintError]"), "{}", r.stderr);
    assert_eq!(r.stderr.lines().count(), 1);

    // missing key
    let missing = tmp.path().join("missing.json");
    std::fs::write(
        &missing,
        r#"{"a":0,"b":1,"c":0,"alpha":0,"beta":0,"gamma":1,"omega_minus":-1,"omega_plus":1}"#,
    )
    .unwrap();
    let r = run(&["classify", "--config", missing.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[ParseError]") && r.stderr.contains("lambda"), "{}", r.stderr);

    // control range not straddling zero
    let range = tmp.path().join("range.json");
    std::fs::write(
        &range,
        r#"{"a":0,"b":1,"c":0,"alpha":0,"beta":0,"gamma":1,"lambda":0,"omega_minus":0.5,"omega_plus":1}"#,
    )
    .unwrap();
    let r = run(&["classify", "--config", range.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[ConstraintError]"), "{}", r.stderr);

    // rank-deficient input rejected by the planner pipeline
    let norank = tmp.path().join("norank.json");
    std::fs::write(
        &norank,
        r#"{"a":0,"b":0,"c":0,"alpha":0,"beta":0,"gamma":1,"lambda":0,"omega_minus":-1,"omega_plus":1}"#,
    )
    .unwrap();
    let r = run(&["control-set", "--config", norank.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[LarcViolated]"), "{}", r.stderr);

    // window too coarse
    let r = run(&[
        "reach",
        "--config",
        golden_dir().join("contracting.json").to_str().unwrap(),
        "--window",
        "-1,1,-1,1",
        "--grid-h",
        "0.5",
        "--out",
        tmp.path().join("r").to_str().unwrap(),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[WindowTooCoarse]"), "{}", r.stderr);

    // steering into a one-point control set family
    let r = run(&[
        "plan",
        "--config",
        golden_dir().join("quadratic.json").to_str().unwrap(),
        "--from",
        "0,0",
        "--to",
        "1,1",
        "--out",
        tmp.path().join("p").to_str().unwrap(),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[NotInControlSet]"), "{}", r.stderr);
}
