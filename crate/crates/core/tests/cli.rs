use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn concentrate(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_concentrate"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const SHARED_BIT: &str = r#"{"kind": "planted_clique", "n": 10, "params": {"k": 10, "p": 0.7}}"#;
const NULL: &str = r#"{"kind": "boolean_iid", "n": 10, "params": {"p": 0.4}}"#;

#[test]
fn bound_prints_json_with_config() {
    let out = concentrate(&["bound", "--n", "20", "--c", "0.5", "--t", "0.2"], None);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["command"], "bound");
    assert!(v["config"].get("workers").is_none());
    assert!((v["bound"].as_f64().unwrap() - 0.192_885_685_223_364_22).abs() < 1e-12);
    assert!((v["lambda_star"]["lambda"].as_f64().unwrap() - 0.2 / (0.5 * 0.7)).abs() < 1e-15);
}

#[test]
fn csv_numbers_round_trip() {
    let out = concentrate(
        &["bound", "--n", "20", "--c", "0.5", "--t", "0.2", "--format", "csv"],
        None,
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let bound: f64 = row[3].parse().unwrap();
    let json_bound = json(&concentrate(&["bound", "--n", "20", "--c", "0.5", "--t", "0.2"], None))["bound"]
        .as_f64()
        .unwrap();
    assert_eq!(bound.to_bits(), json_bound.to_bits());
}

#[test]
fn exit_codes() {
    assert_eq!(
        concentrate(&["detect", "--spec", "-", "--c", "0.4", "--t", "0.3"], Some(SHARED_BIT))
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        concentrate(&["detect", "--spec", "-", "--c", "0.4", "--t", "0.3"], Some(NULL))
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        concentrate(&["bound", "--n", "5", "--c", "0.5", "--t", "0.6"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        concentrate(
            &["detect", "--spec", "-", "--c", "0.4", "--t", "0.3", "--alpha", "1.2"],
            Some(NULL)
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        concentrate(&["verify", "--spec", "-", "--c", "0.5", "--t", "0.1"], Some("{"))
            .status
            .code(),
        Some(2)
    );

    let floor = r#"{"kind": "explicit_table", "support": [{"x": [0, 0, 0], "p": 1}]}"#;
    let out = concentrate(
        &[
            "simulate",
            "--spec",
            "-",
            "--c",
            "0.5",
            "--t",
            "0.4",
            "--samples",
            "5",
            "--conditional",
            "--max-draws",
            "20000",
        ],
        Some(floor),
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("too rare"));

    let wide = r#"{"kind": "boolean_iid", "n": 21, "params": {"p": 0.5}}"#;
    let out = concentrate(&["verify", "--spec", "-", "--c", "0.5", "--t", "0.1"], Some(wide));
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn reports_identical_across_worker_counts() {
    let run = |w: &str| {
        concentrate(
            &[
                "detect",
                "--spec",
                "-",
                "--c",
                "0.4",
                "--t",
                "0.3",
                "--seed",
                "5",
                "--workers",
                w,
            ],
            Some(SHARED_BIT),
        )
        .stdout
    };
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("2"));
    assert_eq!(one, run("8"));

    let sim = |w: &str| {
        concentrate(
            &[
                "simulate",
                "--spec",
                "-",
                "--c",
                "0.4",
                "--t",
                "0.2",
                "--samples",
                "20000",
                "--conditional",
                "--workers",
                w,
            ],
            Some(NULL),
        )
        .stdout
    };
    assert_eq!(sim("1"), sim("8"));
}

#[test]
fn model_file_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("model.json");
    std::fs::write(&spec, r#"{"kind": "boolean_iid", "n": 4, "params": {"p": 0.5}}"#).unwrap();
    let report = dir.path().join("report.json");
    let out = concentrate(
        &[
            "verify",
            "--spec",
            spec.to_str().unwrap(),
            "--c",
            "0.5",
            "--t",
            "0.25",
            "--out",
            report.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success());
    assert_eq!(std::fs::read(&report).unwrap(), out.stdout);
    assert_eq!(json(&out)["status"], "pass");
}

#[test]
fn sweep_emits_plot_ready_table() {
    let out = concentrate(
        &[
            "sweep", "--spec", "-", "--c", "0.5", "--points", "11", "--format", "csv",
        ],
        Some(r#"{"kind": "boolean_iid", "n": 10, "params": {"p": 0.5}}"#),
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11);
    for row in &rows {
        let bound: f64 = row[3].parse().unwrap();
        let tail: f64 = row[7].parse().unwrap();
        assert!(tail <= bound + 1e-12);
    }
    assert_eq!(rows[10][4], "boundary_t_max");
}
