use std::fs;
use std::process::{Command, Output};

fn cslce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cslce"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn gen_then_run_on_the_files_then_score() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = cslce(&[
        "gen",
        "-o",
        d.to_str().unwrap(),
        "--n",
        "60",
        "--p",
        "0.5",
        "--q",
        "0.02",
        "--rng_seed",
        "3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let labels = fs::read_to_string(d.join("labels.txt")).unwrap();
    assert_eq!(labels.lines().count(), 60);
    assert!(!d.join("points.csv").exists());

    let csv = d.join("r.csv");
    let out = cslce(&[
        "run",
        "-o",
        csv.to_str().unwrap(),
        "--dataset",
        "edgelist",
        "--edges",
        d.join("edges.txt").to_str().unwrap(),
        "--labels",
        d.join("labels.txt").to_str().unwrap(),
        "--trials",
        "2",
        "--timing",
        "false",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.contains("# dataset = edgelist\n"));
    assert!(text.contains("\nmean,summary,"));

    // scoring the truth against itself is perfect
    let truth = d.join("labels.txt");
    let out = cslce(&[
        "score",
        "--truth",
        truth.to_str().unwrap(),
        "--assignment",
        truth.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("label,size,found,jaccard,"));
    assert!(stdout.contains("# mean_accuracy = 1\n"));
}

#[test]
fn geometric_gen_writes_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = cslce(&[
        "gen",
        "-o",
        dir.path().to_str().unwrap(),
        "--dataset",
        "geometric",
        "--shape",
        "moons",
        "--per_cluster",
        "20",
        "--embed_dim",
        "4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let points = fs::read_to_string(dir.path().join("points.csv")).unwrap();
    assert_eq!(points.lines().next(), Some("x0,x1,x2,x3,label"));
    assert_eq!(points.lines().count(), 61);
}

#[test]
fn run_to_stdout_is_deterministic() {
    let args = [
        "run", "-j", "2", "--n", "90", "--trials", "3", "--timing", "false",
    ];
    let a = cslce(&args);
    let b = cslce(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("3 trials (0 failed)"));
}

#[test]
fn exit_codes() {
    // config errors
    assert_eq!(cslce(&["run", "--bogus", "1"]).status.code(), Some(1));
    assert_eq!(cslce(&["run", "--gamma", "2"]).status.code(), Some(1));
    assert_eq!(cslce(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        cslce(&["gen", "-o", "/tmp/x", "--dataset", "edgelist"])
            .status
            .code(),
        Some(1)
    );

    // missing and malformed files
    assert_eq!(cslce(&["run", "-c", "/no/such.cfg"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("e.txt");
    fs::write(&edges, "0 1\n1 two\n").unwrap();
    let out = cslce(&[
        "run",
        "--dataset",
        "edgelist",
        "--edges",
        edges.to_str().unwrap(),
        "--labels",
        "l.txt",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2"));

    assert_eq!(cslce(&["--help"]).status.code(), Some(0));
}
