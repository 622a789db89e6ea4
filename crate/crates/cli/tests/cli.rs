use std::path::Path;
use std::process::{Command, Output};

fn eqdirect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqdirect")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = eqdirect(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        ok(&["gen", "--class", "affine-vi", "--n", "4", "--count", "3", "--seed", "11", "--out", d.to_str().unwrap()]);
    }
    for name in ["manifest.json", "affine-vi-n4-s11-i0000.json", "affine-vi-n4-s11-i0002.json"] {
        assert_eq!(read(&a.join(name)), read(&b.join(name)));
    }
    assert!(read(&a.join("manifest.json")).contains("\"count\": 3"));
}

#[test]
fn solve_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("s");
    ok(&["gen", "--class", "trig-vi", "--n", "2", "--count", "1", "--seed", "3", "--out", suite.to_str().unwrap()]);
    let problem = suite.join("trig-vi-n2-s3-i0000.json");
    let trace = dir.path().join("trace.csv");
    let history = dir.path().join("history.csv");
    let stdout = ok(&[
        "solve",
        "--problem",
        problem.to_str().unwrap(),
        "--algo",
        "ldirect",
        "--global-budget",
        "80",
        "--local-budget",
        "20",
        "--lbar",
        "slope:2",
        "--trace",
        trace.to_str().unwrap(),
        "--history",
        history.to_str().unwrap(),
    ]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "problem_id,variant,alpha,n,best_phi,evals_used,gap_bound,initial_value,best_x");
    assert!(lines[1].starts_with("trig-vi-n2-s3-i0000,ldirect,1.0000000000000000e0,2,"));
    let t = read(&trace);
    assert!(t.starts_with("iteration,eval_count,phi_best,gap_bound,num_rectangles\n0,1,"));
    assert!(read(&history).starts_with("problem_id,variant,alpha,eval_count,best_phi\n"));
}

#[test]
fn bench_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("s");
    let out = dir.path().join("o");
    ok(&["gen", "--class", "affine-vi", "--n", "2", "--count", "4", "--seed", "5", "--out", suite.to_str().unwrap()]);
    ok(&[
        "bench",
        "--suite",
        suite.to_str().unwrap(),
        "--algos",
        "direct,ldirect",
        "--global-budget",
        "60",
        "--local-budget",
        "30",
        "--out",
        out.to_str().unwrap(),
    ]);
    let table = read(&out.join("gate_table.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "problem,n,direct_1e-1,direct_1e-3,direct_1e-5,ldirect_1e-1,ldirect_1e-3,ldirect_1e-5");
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[1], "2");
        for f in &fields[2..] {
            assert!(f.parse::<usize>().is_ok() || *f == ">90", "{f}");
        }
    }
    for kind in ["perf", "data"] {
        let p = dir.path().join(format!("{kind}.csv"));
        ok(&["profile", "--records", out.join("records.csv").to_str().unwrap(), "--kind", kind, "--tau", "1e-1", "--out", p.to_str().unwrap()]);
        let text = read(&p);
        assert!(text.starts_with("variant,"));
    }
}

#[test]
fn profile_without_histories_needs_matching_tau() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("s");
    let out = dir.path().join("o");
    ok(&["gen", "--class", "affine-vi", "--n", "1", "--count", "2", "--seed", "1", "--out", suite.to_str().unwrap()]);
    ok(&["bench", "--suite", suite.to_str().unwrap(), "--global-budget", "30", "--local-budget", "10", "--out", out.to_str().unwrap()]);
    std::fs::remove_file(out.join("histories.csv")).unwrap();
    let records = out.join("records.csv");
    let p = dir.path().join("p.csv");
    ok(&["profile", "--records", records.to_str().unwrap(), "--kind", "data", "--tau", "1e-3", "--out", p.to_str().unwrap()]);
    let bad = eqdirect(&["profile", "--records", records.to_str().unwrap(), "--kind", "data", "--tau", "1e-2", "--out", p.to_str().unwrap()]);
    assert!(!bad.status.success());
}

#[test]
fn reports_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, "{\n  \"id\": 1,\n").unwrap();
    let out = eqdirect(&["solve", "--problem", f.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let out = eqdirect(&["solve", "--problem", f.to_str().unwrap(), "--lbar", "weird"]);
    assert!(!out.status.success());
}
