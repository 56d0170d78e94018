//! End-to-end checks of the command-line surface: golden values, output
//! formats, determinism and exit codes.

use std::io::Write;
use std::process::{Command, Output};

fn luroth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_luroth")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = luroth(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn gvalues_luroth_sign_column() {
    let out = stdout(&["gvalues", "--partition", "luroth", "-n", "7"]);
    let signs: Vec<&str> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(signs, vec!["+", "+", "+", "-", "-", "-", "-"]);
    // radii are zero on the exact path
    for line in out.lines().skip(1) {
        let radius = line.split(',').nth(3).unwrap();
        assert_eq!(radius, "0.0000000000000000e0");
    }
}

#[test]
fn gvalues_dyadic_certified_zero() {
    let out = stdout(&["gvalues", "--partition", "dyadic", "-n", "4"]);
    for line in out.lines().skip(1) {
        assert!(line.ends_with(",0"), "want certified-zero sign: {line}");
    }
}

#[test]
fn cdf_dyadic_identity() {
    let out = stdout(&["cdf", "--partition", "dyadic", "--eps", "all-zero", "--z", "0.25"]);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "z,F_analytic,radius");
    let row = lines.next().unwrap();
    assert!(row.starts_with("2.5000000000000000e-1,2.5000000000000000e-1,"), "{row}");
}

#[test]
fn mset_luroth_depth3_is_eight_pieces() {
    let out = stdout(&["mset", "--partition", "luroth", "--depth", "3"]);
    assert!(out.contains("\"verdict\":\"finite-union(8)\""), "{out}");
    let merged = out.split("\"merged\":[").nth(1).unwrap().split(']').next().unwrap();
    assert_eq!(merged.matches("{\"lo\":").count(), 8);
    assert!(out.contains("\"ambiguous\":[]"));
}

#[test]
fn classify_strict_exit_codes() {
    // alternating G signs leave the verdict open; strict mode exits 3
    let undetermined = &["classify", "--partition", "two-periodic:21/40,1/3"];
    assert!(luroth(undetermined).status.success());
    let strict = luroth(&["classify", "--partition", "two-periodic:21/40,1/3", "--strict"]);
    assert_eq!(strict.status.code(), Some(3));
    let fine = luroth(&["classify", "--partition", "geometric:0.4", "--strict"]);
    assert!(fine.status.success());
    let txt = String::from_utf8(fine.stdout).unwrap();
    assert!(txt.contains("\"verdict\":\"homogeneous-cantor\""));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["classify", "--partition", "cantor-dust"],
        vec!["classify", "--partition", "geometric:1.5"],
        vec!["cdf", "--partition", "luroth", "--eps", "sometimes", "--z", "0.5"],
        vec!["cdf", "--partition", "luroth", "--eps", "all-zero", "--z", "1.5"],
        vec!["dim", "--partition", "dyadic", "--kmax", "10"],
        vec!["nonsense-subcommand"],
    ] {
        let out = luroth(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn partition_config_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex1.json");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(f, r#"{{"generator": {{"two_periodic": {{"t2": "3/5", "ratio": "1/2"}}}}}}"#).unwrap();
    let out = stdout(&["classify", "--partition", path.to_str().unwrap()]);
    assert!(out.contains("\"verdict\":\"finite-union(1)\""), "{out}");
}

#[test]
fn expand_terminating_trace_emits_null_digits() {
    let out = stdout(&[
        "expand",
        "--partition",
        "dyadic",
        "--eps",
        "all-one",
        "--x",
        "0.5",
        "--steps",
        "3",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].contains("\"d\":2"));
    assert!(lines[1].contains("\"d\":null"));
    assert!(lines[1].contains("\"q\":null"));
    assert!(lines[2].contains("\"theta\":0.0000000000000000e0"));
}

#[test]
fn theta_reports_identity_residual() {
    let out = stdout(&[
        "theta",
        "--partition",
        "luroth",
        "--eps",
        "period:01",
        "--x",
        "0.7",
        "--steps",
        "20",
    ]);
    let last = out.lines().last().unwrap();
    assert!(last.contains("\"max_identity_residual\":"));
    let value: f64 = last
        .split("\"max_identity_residual\":")
        .nth(1)
        .unwrap()
        .trim_end_matches('}')
        .parse()
        .unwrap();
    assert!(value <= 1e-12, "residual {value}");
}

#[test]
fn dim_csv_shape() {
    let out = stdout(&["dim", "--partition", "geometric:0.4", "--kmax", "5"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k,interval_length,dimH_approx,dimP_approx");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("1,"));
    // constant sequence for a geometric tail
    let dimh: f64 = lines[5].split(',').nth(2).unwrap().parse().unwrap();
    assert!((dimh - 0.75647079736603).abs() < 1e-10);
}

#[test]
fn byte_identical_reruns() {
    let args = [
        "cdf",
        "--partition",
        "luroth",
        "--eps",
        "all-one",
        "--grid",
        "9",
        "--empirical",
        "20000",
        "--seed",
        "7",
    ];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["mset", "--partition", "geometric:0.3", "--depth", "4"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn output_file_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = luroth(&[
        "gvalues",
        "--partition",
        "dyadic",
        "-n",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("n,g,G,radius,sign\n"));
}

#[test]
fn inline_json_partition() {
    let out = stdout(&[
        "partition",
        "--partition",
        r#"{"generator": {"geometric": "0.3"}}"#,
        "--rows",
        "2",
    ]);
    assert!(out.contains("\"generator\":\"geometric(3/10)\""));
    assert!(out.contains("\"certified\":true"));
}
