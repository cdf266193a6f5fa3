//! End-to-end tests of the `callgrid` binary: CSV contracts, determinism,
//! exit codes and frame rendering.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn callgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_callgrid"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn simulate_writes_one_row_per_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("series.csv");
    let result = callgrid(&[
        "simulate",
        "--lambda",
        "0.07",
        "--mu",
        "0.03",
        "--cycles",
        "200",
        "--seed",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "cycle,busy_count");
    assert_eq!(lines.len(), 201);
    assert!(lines[1].starts_with("1,"));
    assert!(lines[200].starts_with("200,"));
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let result = callgrid(&[
            "simulate",
            "--lambda",
            "0.05",
            "--mu",
            "0.05",
            "--cycles",
            "500",
            "--seed",
            "9",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn simulate_rejects_zero_cycles_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let result = callgrid(&[
        "simulate",
        "--lambda",
        "0.07",
        "--mu",
        "0.03",
        "--cycles",
        "0",
        "--seed",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(
        stderr.contains("cycles"),
        "message must name the field: {stderr}"
    );
    assert!(!out.exists(), "no partial output on usage errors");
}

#[test]
fn simulate_rejects_negative_lambda() {
    let result = callgrid(&[
        "simulate", "--lambda", "-0.1", "--mu", "0.03", "--cycles", "10", "--seed", "1",
    ]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("lambda"));
}

#[test]
fn rs_from_simulation_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let result = callgrid(&[
        "rs",
        "--lambda",
        "0.07",
        "--mu",
        "0.03",
        "--cycles",
        "4096",
        "--seed",
        "3",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    let summary = stdout.lines().last().unwrap();
    assert!(summary.starts_with("H="), "summary line: {summary}");
    assert!(summary.contains("intercept="));
    assert!(summary.contains("r2="));
    assert!(summary.contains("points="));

    let curve = fs::read_to_string(&out).unwrap();
    assert!(curve.starts_with("n,rs,log2_half_n,log2_rs\n"));
    assert!(curve.lines().count() > 5);
}

#[test]
fn rs_from_series_file() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("series.csv");
    // A sawtooth: non-degenerate at every prefix length.
    let mut text = String::from("cycle,busy_count\n");
    for i in 0..2000 {
        text.push_str(&format!("{},{}\n", i + 1, (i * 17 + 3) % 91));
    }
    fs::write(&series, text).unwrap();
    let result = callgrid(&["rs", "--input", series.to_str().unwrap()]);
    assert!(result.status.success());
    assert!(String::from_utf8_lossy(&result.stdout).contains("H="));
}

#[test]
fn rs_constant_series_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("flat.csv");
    let mut text = String::from("cycle,busy_count\n");
    for i in 0..1000 {
        text.push_str(&format!("{},4\n", i + 1));
    }
    fs::write(&series, text).unwrap();
    let result = callgrid(&["rs", "--input", series.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("insufficient data"));
}

#[test]
fn sweep_single_cell_and_fit_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let result = callgrid(&[
        "sweep",
        "--lambdas",
        "0.05",
        "--mus",
        "0.05",
        "--realizations",
        "2",
        "--cycles",
        "600",
        "--burn-in",
        "100",
        "--seed-base",
        "4",
        "--fit-c",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "lambda,mu,mean_z,std_z,mean_h,std_h,realizations_used"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.05,0.05,"));
    assert!(lines[1].ends_with(",2"));
    assert!(lines[2].starts_with("# C="));
    assert!(lines[2].contains("rms="));
}

#[test]
fn sweep_repeated_invocation_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let result = callgrid(&[
            "sweep",
            "--lambdas",
            "0.04,0.08",
            "--mus",
            "0.05",
            "--realizations",
            "3",
            "--cycles",
            "600",
            "--burn-in",
            "0",
            "--seed-base",
            "11",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweep_reads_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("grid.spec");
    fs::write(
        &spec,
        "lambdas=0.04,0.08\nmus=0.05\nrealizations=2\nseed_base=3\ncycles=500\nburn_in=0\n",
    )
    .unwrap();
    let result = callgrid(&["sweep", "--spec", spec.to_str().unwrap()]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn sweep_without_seed_is_a_usage_error() {
    let result = callgrid(&["sweep", "--lambdas", "0.05", "--mus", "0.05"]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("seed_base"));
}

#[test]
fn render_ascii_frames() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    let result = callgrid(&[
        "render",
        "--lambda",
        "0.07",
        "--mu",
        "0.03",
        "--width",
        "5",
        "--height",
        "5",
        "--cycles",
        "30",
        "--seed",
        "2",
        "--frame-every",
        "10",
        "--output",
        frames.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let mut names: Vec<String> = fs::read_dir(&frames)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec!["frame_000010.txt", "frame_000020.txt", "frame_000030.txt"]
    );
    let text = fs::read_to_string(frames.join("frame_000010.txt")).unwrap();
    let numbers: Vec<i64> = text
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(numbers.len(), 25);
    assert!(
        numbers.iter().all(|&n| n != 0),
        "counters are never zero between cycles"
    );
}

#[test]
fn render_ppm_frames() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    let result = callgrid(&[
        "render",
        "--lambda",
        "0.07",
        "--mu",
        "0.03",
        "--width",
        "4",
        "--height",
        "4",
        "--cycles",
        "10",
        "--seed",
        "2",
        "--frame-every",
        "10",
        "--format",
        "ppm",
        "--output",
        frames.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let path = frames.join("frame_000010.ppm");
    assert!(Path::new(&path).exists());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("P3\n4 4\n255\n"));
}
