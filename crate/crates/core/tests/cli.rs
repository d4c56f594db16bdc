use std::path::Path;
use std::process::{Command, Output};

fn ppm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppm-sdp"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn sample_solve_certify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let s = ppm(d, &["--seed", "3", "sample", "--n", "150", "--pi", "0.5,0.3,0.2", "--p-tilde", "20", "--q-tilde", "2", "--out-graph", "g.txt", "--out-labels", "l.txt"]);
    assert_eq!(code(&s), 0, "{}", String::from_utf8_lossy(&s.stderr));

    let solved = ppm(d, &["solve", "--graph", "g.txt", "--mode", "known", "--sizes", "75,45,30", "--out-labels", "s.txt", "--out-matrix", "x.txt"]);
    assert_eq!(code(&solved), 0);
    let summary = json(&solved);
    assert_eq!(summary["rounded"], true);
    let matrix = std::fs::read_to_string(d.join("x.txt")).unwrap();
    assert_eq!(matrix.lines().count(), 150);
    assert_eq!(matrix.lines().next().unwrap().split_whitespace().count(), 150);

    let cert = ppm(d, &["certify", "--graph", "g.txt", "--labels", "s.txt", "--p-tilde", "20", "--q-tilde", "2"]);
    assert_eq!(code(&cert), 0);
    assert_eq!(json(&cert)["verified"], true);

    // a labeling with two vertices swapped between communities is not certified
    let labels = std::fs::read_to_string(d.join("s.txt")).unwrap();
    let mut lines: Vec<String> = labels.lines().map(String::from).collect();
    let c0 = lines[0].split_whitespace().nth(1).unwrap().to_string();
    let c149 = lines[149].split_whitespace().nth(1).unwrap().to_string();
    lines[0] = format!("0 {c149}");
    lines[149] = format!("149 {c0}");
    std::fs::write(d.join("bad.txt"), lines.join("\n") + "\n").unwrap();
    let bad = ppm(d, &["certify", "--graph", "g.txt", "--labels", "bad.txt", "--omega", "0.3", "--p", "0.8", "--q", "0.05"]);
    assert_ne!(code(&bad), 0);
    assert_eq!(json(&bad)["verified"], false);
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&ppm(d, &["sample", "--n", "60", "--pi", "0.5,0.5", "--p-tilde", "2", "--q-tilde", "2", "--out-graph", "er.txt"])), 0);
    let capped = ppm(d, &["solve", "--graph", "er.txt", "--mode", "unknown", "--r", "2", "--omega", "0.05", "--max-iters", "5"]);
    assert_eq!(code(&capped), 3);
    assert_eq!(json(&capped)["converged"], false);

    // an empty graph converges to a non-partition
    std::fs::write(d.join("empty.txt"), "8 0\n").unwrap();
    let empty = ppm(d, &["solve", "--graph", "empty.txt", "--mode", "unknown", "--r", "2", "--omega", "0.3"]);
    assert_eq!(code(&empty), 2, "{}", String::from_utf8_lossy(&empty.stdout));

    let missing = ppm(d, &["solve", "--graph", "er.txt", "--mode", "known"]);
    assert_eq!(code(&missing), 1);
}

#[test]
fn oracle_guard_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("g.txt"), "15 2\n0 1\n2 3\n").unwrap();
    let refused = ppm(d, &["oracle", "--graph", "g.txt", "--mode", "unknown", "--r", "2", "--omega", "0.5"]);
    assert_eq!(code(&refused), 1);
    assert!(String::from_utf8_lossy(&refused.stderr).contains("exceeds limit 14"));
    let forced = ppm(d, &["oracle", "--graph", "g.txt", "--mode", "unknown", "--r", "2", "--omega", "0.5", "--max-n", "15"]);
    assert_eq!(code(&forced), 0);
    assert_eq!(json(&forced)["evaluated"], 16383);
}

#[test]
fn threshold_from_flags_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let flags = json(&ppm(d, &["threshold", "--pi", "0.5,0.5", "--p-tilde", "8", "--q-tilde", "2"]));
    assert!((flags["min_value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(flags["feasible"], false);
    std::fs::write(
        d.join("m.json"),
        r#"{"q_tilde_matrix": [[31.4, 15, 11], [15, 31.4, 10], [11, 10, 31.4]], "pi": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]}"#,
    )
    .unwrap();
    let file = json(&ppm(d, &["threshold", "--model", "m.json"]));
    assert_eq!(file["feasible"], true);
}

#[test]
fn adversary_and_tails() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ppm(d, &["sample", "--n", "80", "--pi", "0.5,0.5", "--p-tilde", "10", "--q-tilde", "2", "--out-graph", "g.txt", "--out-labels", "l.txt"]);
    std::fs::write(d.join("spec.json"), r#"{"kind": "scripted", "params": {"changes": [{"op": "add", "u": 0, "v": 1}]}}"#).unwrap();
    let ok = ppm(d, &["adversary", "--graph", "g.txt", "--labels", "l.txt", "--spec", "spec.json", "--out", "h.txt"]);
    assert_eq!(code(&ok), 0);
    std::fs::write(d.join("bad.json"), r#"{"kind": "scripted", "params": {"changes": [{"op": "add", "u": 0, "v": 79}]}}"#).unwrap();
    let bad = ppm(d, &["adversary", "--graph", "g.txt", "--labels", "l.txt", "--spec", "bad.json", "--out", "h.txt"]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("(0, 79)"));

    let t = json(&ppm(d, &["--seed", "4", "tails", "--n", "2000", "--pi", "0.5,0.5", "--p-tilde", "3", "--q-tilde", "2", "--samples", "20000"]));
    assert!(t["exponent"].as_f64().unwrap() < 1.0);
    assert!(t["note"].as_str().unwrap().contains("demonstration"));
}

#[test]
fn phase_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("cfg.json"),
        r#"{"n": [40], "pi": [[0.5, 0.5]], "q_tilde": [1.0], "p_tilde": [3.0, 9.0], "trials": 2, "algorithms": ["solve_unknown", "certify_only"], "solver": {"max_iters": 500}}"#,
    )
    .unwrap();
    let strip = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_default())
            .collect()
    };
    let a = ppm(d, &["--seed", "9", "phase", "--config", "cfg.json", "--trial-log", "t1.csv"]);
    let b = ppm(d, &["--seed", "9", "phase", "--config", "cfg.json", "--trial-log", "t2.csv", "--jobs", "2"]);
    assert_eq!(code(&a), 0);
    let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
    assert_eq!(a.lines().count(), 5);
    assert!(a.starts_with("cell,n,r,pi,p_tilde,q_tilde,min_divergence,algorithm,trials,successes"));
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(std::fs::read(d.join("t1.csv")).unwrap(), std::fs::read(d.join("t2.csv")).unwrap());
}

#[test]
fn omega_sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ppm(d, &["sample", "--n", "60", "--pi", "0.6,0.4", "--p-tilde", "12", "--q-tilde", "1", "--out-graph", "g.txt", "--out-labels", "l.txt"]);
    let o = ppm(d, &["omega-sweep", "--graph", "g.txt", "--r", "2", "--omegas", "0.2,0.25", "--reference", "l.txt", "--out", "sweep.csv"]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(d.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("r,omega,converged,iterations,objective,partition,max_deviation,matched_reference,message"));
    assert_eq!(csv.lines().count(), 3);
}
