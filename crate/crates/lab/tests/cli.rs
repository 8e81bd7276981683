//! End-to-end runs of the `kms` command line.

use std::path::{Path, PathBuf};
use std::process::Command;

use kms_lab::cli::run_with;
use kms_lab::formats::{decode_field, decode_multiplier, fnv1a64};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn kms(args: &[&str], workers: Option<usize>) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("kms").chain(args.iter().copied());
    let code = run_with(argv, workers, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn ok_json(args: &[&str]) -> Value {
    let r = kms(args, None);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    validate(&v);
    v
}

fn validate(report: &Value) {
    let schema: Value = serde_json::from_str(kms_lab::report::SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_explicit_curl_file() {
    let spec = data("curl3.op");
    let v = ok_json(&["classify", "--spec", path(&spec)]);
    let r = &v["result"]["report"];
    assert_eq!(r["is_elliptic"], false);
    assert_eq!(r["is_constant_rank"], true);
    assert_eq!(r["common_rank"], 6);
    assert_eq!(r["is_cancelling"], true);
    assert_eq!(v["manifest"]["command"], "classify");
    let inputs = v["manifest"]["inputs"].as_array().unwrap();
    assert_eq!(inputs.len(), 1);
    assert_eq!(inputs[0]["contents"], std::fs::read_to_string(&spec).unwrap());
    assert_eq!(v["manifest"]["verdicts"][0]["common_rank"], 6);
    assert!(v["manifest"].get("timestamp_unix").is_none());

    let on_sym = ok_json(&["classify", "--spec", path(&spec), "--on-kernel-of", "sym", "--complex"]);
    assert_eq!(on_sym["result"]["report"]["is_elliptic"], true);
    assert_eq!(on_sym["result"]["kernel_dim"], 3);
}

#[test]
fn classify_by_catalog_name_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let named = dir.path().join("named.op");
    std::fs::write(&named, "catalog = \"curl3\"\nn = 3\n").unwrap();
    let by_name = ok_json(&["classify", "--spec", path(&named)]);
    let by_file = ok_json(&["classify", "--spec", path(&data("curl3.op"))]);
    for key in ["is_elliptic", "is_constant_rank", "common_rank", "is_cancelling", "rank_histogram"] {
        assert_eq!(by_name["result"]["report"][key], by_file["result"]["report"][key], "{key}");
    }
}

#[test]
fn verify_is_deterministic() {
    let cfg = data("kms_sym_p2.cfg");
    let args = ["verify", "--config", path(&cfg), "--trials", "50", "--seed", "7"];
    let a = kms(&args, Some(2));
    let b = kms(&args, Some(3));
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    validate(&v);
    assert_eq!(v["manifest"]["root_seed"], 7);
    assert_eq!(v["result"]["kind"], "estimate");
    assert_eq!(v["result"]["trials"].as_array().unwrap().len(), 50);
    let max = v["result"]["max_ratio"].as_f64().unwrap();
    assert!(max.is_finite() && max > 0.0);
}

#[test]
fn verify_refinement_from_config_sizes() {
    let v = ok_json(&["verify", "--config", path(&data("korn_const_tr_uncorrected.cfg"))]);
    assert_eq!(v["result"]["kind"], "refinement");
    assert_eq!(v["result"]["growth"], "inf");
    for e in v["result"]["entries"].as_array().unwrap() {
        assert_eq!(e["estimate"]["max_ratio"], "inf");
    }
}

#[test]
fn bad_operator_file_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("curl3.op")).unwrap();
    // drop the last row of the second coefficient
    let lines: Vec<&str> = text.lines().collect();
    let second = lines.iter().enumerate().filter(|(_, l)| l.starts_with("[[coeff]]")).nth(1).unwrap().0;
    let drop = second + 11;
    assert!(lines[drop].trim_start().starts_with('['));
    let close = second + 12;
    let broken: Vec<&str> = lines.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, l)| *l).collect();
    let file = dir.path().join("broken.op");
    std::fs::write(&file, broken.join("\n")).unwrap();

    let r = kms(&["classify", "--spec", path(&file)], None);
    assert_eq!(r.code, 2);
    // the closing bracket moved up by one line after the deletion
    let want = format!("broken.op:{}:", close);
    assert!(r.stderr.contains(&want), "{}", r.stderr);
    assert!(r.stderr.contains("field `matrix`") && r.stderr.contains("8 rows, expected l = 9"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn bad_config_and_names_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.cfg");
    std::fs::write(&cfg, "p = 2.0\ngrid = 8\ninequality = \"kms_sim\"\noperator = \"curl3\"\npartmap = \"sym\"\n").unwrap();
    let r = kms(&["verify", "--config", path(&cfg)], None);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("typo.cfg:3:") && r.stderr.contains("inequality"), "{}", r.stderr);

    let r = kms(&["demo", "necessity", "--A", "trace", "--B", "curl3"], None);
    assert_eq!(r.code, 2, "{}", r.stderr);
    let r = kms(&["classify", "--spec", "not_an_operator"], None);
    assert_eq!(r.code, 2, "{}", r.stderr);
    let r = kms(&["classify"], None);
    assert_eq!(r.code, 2);
    let r = kms(&["--help"], None);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("classify"));
}

#[test]
fn violated_hypothesis_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ellip.cfg");
    // Curl is not elliptic on the tracefree matrices
    std::fs::write(&cfg, "inequality = \"korn_ellip\"\np = 2.0\ngrid = 8\noperator = \"curl3\"\npartmap = \"tr\"\n").unwrap();
    let r = kms(&["verify", "--config", path(&cfg)], None);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stderr.contains("elliptic"), "{}", r.stderr);
}

#[test]
fn necessity_and_crosscheck_reports() {
    let n = ok_json(&["demo", "necessity", "--A", "tr", "--B", "curl3", "--grid", "8"]);
    let outcome = &n["result"]["outcome"];
    assert_eq!(outcome["status"], "demonstrated");
    assert_eq!(outcome["uncorrected"]["ratio"], "inf");
    assert_eq!(n["manifest"]["verdicts"][0]["restricted_to_kernel_of"], "tr");

    let none = ok_json(&["demo", "necessity", "--A", "sym", "--B", "curl3", "--grid", "8"]);
    assert_eq!(none["result"]["outcome"]["status"], "correction_unnecessary");

    let s = ok_json(&["crosscheck", "curl-riesz", "--mode", "symbol", "--grid", "8"]);
    assert!(s["result"]["max_deviation"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn field_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("f.bin");
    let v = ok_json(&[
        "field", "gen", "--generator", "random", "--n", "3", "--grid", "8", "--d", "9", "--seed", "4", "--dump",
        path(&dump),
    ]);
    let bytes = std::fs::read(&dump).unwrap();
    assert_eq!(v["result"]["byte_len"], bytes.len());
    assert_eq!(v["result"]["fnv1a64"], format!("{:016x}", fnv1a64(&bytes)));
    let field = decode_field("f.bin", &bytes).unwrap();
    assert_eq!(field.fiber_dim(), 9);
    assert_eq!(field.grid().points_per_axis(), 8);
}

#[test]
fn multiplier_dump_of_projection() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("pi.bin");
    let v = ok_json(&[
        "multiplier", "dump", "--B", "curl_vector", "--kind", "projection", "--grid", "4", "--dump", path(&dump),
    ]);
    assert_eq!(v["result"]["shape"], serde_json::json!([3, 3]));
    let m = decode_multiplier("pi.bin", &std::fs::read(&dump).unwrap()).unwrap();
    // at ξ = (0, 0, 1) the kernel of curl is span{ξ}
    let flat = m.grid.frequency_index(&[0, 0, 1]).unwrap();
    let (phase, mat) = &m.entries[flat];
    assert_eq!(*phase, (1.0, 0.0));
    let want = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    assert!(mat.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-14), "{mat:?}");
}

#[test]
fn replay_is_bit_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("run.json");
    let cfg = data("korn_const_tr.cfg");
    let first = kms(
        &["verify", "--config", path(&cfg), "--trials", "6", "--seed", "3", "--out", path(&report)],
        Some(1),
    );
    assert_eq!(first.code, 0, "{}", first.stderr);
    let original = std::fs::read_to_string(&report).unwrap();
    validate(&serde_json::from_str(&original).unwrap());

    for workers in [1, 4] {
        let again = dir.path().join(format!("again{workers}.json"));
        let r = kms(
            &["replay", "--manifest", path(&report), "--check", "--out", path(&again)],
            Some(workers),
        );
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(std::fs::read_to_string(&again).unwrap(), original);
    }

    // a tampered result no longer matches its own manifest
    let mut v: Value = serde_json::from_str(&original).unwrap();
    v["result"]["max_ratio"] = serde_json::json!(123.0);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string_pretty(&v).unwrap() + "\n").unwrap();
    let r = kms(&["replay", "--manifest", path(&tampered), "--check"], Some(2));
    assert_eq!(r.code, 1);
}

#[test]
fn timestamp_is_opt_in() {
    let v = ok_json(&["classify", "--spec", path(&data("sym_gradient.op")), "--timestamp"]);
    assert!(v["manifest"]["timestamp_unix"].as_u64().unwrap() > 1_600_000_000);
}

#[test]
fn binary_honours_worker_variable() {
    let exe = env!("CARGO_BIN_EXE_kms");
    let out = Command::new(exe)
        .args(["classify", "--spec", path(&data("sym_gradient.op")), "-q"])
        .env("KMS_WORKERS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["report"]["is_elliptic"], true);

    let bad = Command::new(exe)
        .args(["classify", "--spec", path(&data("sym_gradient.op"))])
        .env("KMS_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
