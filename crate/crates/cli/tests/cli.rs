//! End-to-end tests of the command-line interface: golden structure of the
//! emitted documents, exit codes, byte-identical round trips, and
//! determinism under a fixed seed.

use std::path::PathBuf;
use std::process::{Command, Output};

use logmat_core::config::{canonical_json, InputDoc};
use logmat_core::report::{BuildHDoc, CertifyDoc, EvalDoc, KeySumDoc, MinorsDoc, WeierstrassDoc};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logmat"))
}

fn scratch(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("logmat-test-{}-{name}", std::process::id()));
    p
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const ELLIPTIC: &str = r#"{
  "p": 3,
  "precision": 20,
  "g": 1,
  "primes": [{"label": "v", "f": 1, "c": [[0, -1], [1, 0]]}],
  "coleman": {"explicit": [
    {"tuple": [[1]], "coefficients": [1]},
    {"tuple": [[2]], "coefficients": [1]}
  ]}
}"#;

#[test]
fn build_h_emits_two_matrices() {
    let cfg = write_config("buildh.json", ELLIPTIC);
    let out = run(&[
        "build-h",
        "--input",
        cfg.to_str().unwrap(),
        "--n-min",
        "1",
        "--n-max",
        "2",
        "--format",
        "json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: BuildHDoc = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc.matrices.len(), 2);
    assert_eq!(doc.matrices[0].n, 1);
    let block = &doc.matrices[0].blocks[0];
    assert_eq!(block.label, "v");
    // C_{v,1} for the rotation matrix: bottom-left entry is -Phi_3(1+X),
    // whose coefficients are -3, -3, -1.
    let bottom_left = &block.rows[1][0];
    assert_eq!(bottom_left.coefficients.len(), 3);
    assert!(bottom_left.exact);
    // Top-left entry of C_{v,1} is the exact zero series.
    assert!(block.rows[0][0].coefficients.is_empty());
}

#[test]
fn malformed_matrix_row_is_config_error() {
    let cfg = write_config("malformed.json", &ELLIPTIC.replace("[1, 0]", "[1, 0, 5]"));
    let out = run(&["build-h", "--input", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("primes[0].c[1]"), "{err}");
}

#[test]
fn empty_n_range_is_config_error() {
    let cfg = write_config("range.json", ELLIPTIC);
    let out = run(&[
        "build-h",
        "--input",
        cfg.to_str().unwrap(),
        "--n-min",
        "3",
        "--n-max",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty n-range"));
}

#[test]
fn non_unit_determinant_is_invariant_violation() {
    let cfg = write_config(
        "nonunit.json",
        &ELLIPTIC.replace("[[0, -1], [1, 0]]", "[[3, -1], [3, 0]]"),
    );
    let out = run(&["build-h", "--input", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("det C_v") && err.contains("unit"), "{err}");
}

#[test]
fn certify_antidiagonal_demo_is_certified_with_n0_one() {
    let cfg = write_config("certify.json", ELLIPTIC);
    let out = run(&[
        "certify",
        "--input",
        cfg.to_str().unwrap(),
        "--n-min",
        "1",
        "--n-max",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: CertifyDoc = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc.overall, "certified");
    assert_eq!(doc.certificate.threshold_n0, Some(1));
    assert_eq!(doc.rows.len(), 6);
}

#[test]
fn certify_mixed_mu_is_indeterminate_with_named_hypothesis() {
    let cfg = write_config(
        "mixedmu.json",
        r#"{
  "p": 3,
  "g": 1,
  "primes": [{"label": "v", "f": 1, "c": [[0, -1], [1, 3]]}],
  "coleman": {"synthetic": {"seed": 9, "families": [
    {"tuple": [[1]], "mu": 0, "lambda": 1},
    {"tuple": [[2]], "mu": 1, "lambda": 1}
  ]}}
}"#,
    );
    let out = run(&[
        "certify",
        "--input",
        cfg.to_str().unwrap(),
        "--n-max",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc: CertifyDoc = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc.overall, "indeterminate");
    let diag = doc.certificate.diagnostic.unwrap();
    assert!(diag.contains("mu-invariant hypothesis"), "{diag}");
}

#[test]
fn certify_general_shape_gives_per_n_verdicts_without_threshold() {
    let cfg = write_config(
        "general.json",
        r#"{
  "p": 3,
  "g": 1,
  "primes": [{"label": "v", "f": 1, "c": [[1, 1], [1, 2]]}],
  "coleman": {"explicit": [
    {"tuple": [[1]], "coefficients": [1]},
    {"tuple": [[2]], "coefficients": [1]}
  ]}
}"#,
    );
    let out = run(&[
        "certify",
        "--input",
        cfg.to_str().unwrap(),
        "--n-max",
        "3",
        "--format",
        "json",
    ]);
    let doc: CertifyDoc = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(doc.certificate.threshold_n0.is_none());
    assert!(doc
        .certificate
        .diagnostic
        .as_ref()
        .is_some_and(|d| d.contains("not block anti-diagonal")));
    // The direct sums are still evaluated level by level.
    assert_eq!(doc.rows.len(), 3);
    for row in &doc.rows {
        assert!(row.key_sum.sum_valuation.is_some());
    }
}

#[test]
fn emitted_documents_round_trip_byte_identically() {
    let cfg = write_config("roundtrip.json", ELLIPTIC);
    let common = [
        "--input",
        cfg.to_str().unwrap(),
        "--n-max",
        "2",
        "--format",
        "json",
    ];
    macro_rules! check {
        ($cmd:literal, $ty:ty) => {{
            let out = run(&[&[$cmd], &common[..]].concat());
            assert!(
                out.status.code() == Some(0),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            let body = stdout_str(&out);
            let doc: $ty = serde_json::from_str(&body).unwrap();
            assert_eq!(canonical_json(&doc), body, "{} round trip", $cmd);
        }};
    }
    check!("build-h", BuildHDoc);
    check!("eval", EvalDoc);
    check!("minors", MinorsDoc);
    check!("key-sum", KeySumDoc);
    check!("certify", CertifyDoc);
    check!("weierstrass", WeierstrassDoc);
}

#[test]
fn synthetic_seed_is_deterministic() {
    let cfg = write_config(
        "seeded.json",
        r#"{
  "p": 3,
  "g": 1,
  "primes": [{"label": "v", "f": 1, "c": [[0, -1], [1, 3]]}],
  "coleman": {"synthetic": {"seed": 17, "families": [
    {"tuple": [[1]], "mu": 0, "lambda": 2},
    {"tuple": [[2]], "mu": 0, "lambda": 1}
  ]}}
}"#,
    );
    let args = [
        "certify",
        "--input",
        cfg.to_str().unwrap(),
        "--n-max",
        "4",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(stdout_str(&a), stdout_str(&b));
    // A different seed changes the family (and so the document).
    let c = run(&[&args[..], &["--seed", "18"]].concat());
    assert_ne!(stdout_str(&a), stdout_str(&c));
}

#[test]
fn gl2_constructs_usable_configs() {
    let out = run(&["gl2", "--p", "3", "--a", "0", "--b", "-1"]);
    assert!(out.status.success());
    let body = stdout_str(&out);
    let doc: InputDoc = serde_json::from_str(&body).unwrap();
    assert_eq!(doc.p, 3);
    assert_eq!(doc.g, 1);
    // Canonical config round trip.
    assert_eq!(canonical_json(&doc), body);
    // The emitted config feeds straight back into build-h.
    let cfg = scratch("gl2.json");
    std::fs::write(&cfg, &body).unwrap();
    let out = run(&["build-h", "--input", cfg.to_str().unwrap(), "--n-max", "1"]);
    assert!(out.status.success());

    // Multi-factor form.
    let out = run(&["gl2", "--p", "5", "--block", "0,-1,1", "--block", "5,2,2"]);
    assert!(out.status.success());
    let doc: InputDoc = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc.g, 3);
    assert_eq!(doc.primes[0].c.len(), 6);

    // The trace condition is enforced.
    let out = run(&["gl2", "--p", "3", "--a", "1", "--b", "-1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p Z_p"));
}

#[test]
fn text_format_is_human_readable() {
    let cfg = write_config("text.json", ELLIPTIC);
    let out = run(&["key-sum", "--input", cfg.to_str().unwrap(), "--n-max", "2"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.contains("key-sum  p = 3"));
    assert!(text.contains("n = 1: nonzero-at-n"));
}

#[test]
fn missing_coleman_tuples_are_flagged_and_treated_as_zero() {
    let cfg = write_config(
        "missing.json",
        &ELLIPTIC.replace(
            r#"{"tuple": [[1]], "coefficients": [1]},
    "#,
            "",
        ),
    );
    let out = run(&[
        "key-sum",
        "--input",
        cfg.to_str().unwrap(),
        "--n-max",
        "2",
        "--format",
        "json",
    ]);
    assert!(
        out.status.code() == Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: KeySumDoc = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc.missing_tuples.len(), 1);
    // At n = 2 the surviving term pairs with the missing tuple, so the sum
    // is exactly zero there.
    assert_eq!(doc.rows[1].n, 2);
    assert!(matches!(
        doc.rows[1].verdict.kind,
        logmat_core::criterion::VerdictKind::ZeroAtN
    ));
}

#[test]
fn eval_golden_values_at_level_one() {
    // H_{v,1}(eps_1) for the rotation matrix is [[0, 1], [0, 0]].
    let cfg = write_config("evalgold.json", ELLIPTIC);
    let out = run(&[
        "eval",
        "--input",
        cfg.to_str().unwrap(),
        "--n-min",
        "1",
        "--n-max",
        "1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: EvalDoc = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rows = &doc.matrices[0].blocks[0].rows;
    assert!(rows[0][0].coefficients.is_empty(), "exact zero");
    assert_eq!(
        rows[0][1].coefficients,
        vec!["1 * 3^0 (mod 3^20)".to_string()]
    );
    assert!(rows[1][0].coefficients.is_empty());
    assert!(rows[1][1].coefficients.is_empty());
}
