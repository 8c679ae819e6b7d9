use std::path::Path;
use std::process::Command;

use swapfl_cli::{
    main_with_args, BenchReport, EXIT_INFEASIBLE, EXIT_OK, EXIT_PROTOCOL, EXIT_USAGE,
};
use swapfl_core::instance::io;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut full = vec!["swapfl"];
    full.extend_from_slice(args);
    let code = main_with_args(full, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn generate(dir: &Path, kind: &str, size_flag: &str, size: &str, count: &str) -> Vec<String> {
    let (code, out) = run(&[
        "generate",
        "--kind",
        kind,
        size_flag,
        size,
        "--count",
        count,
        "--seed",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    out.lines()
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect()
}

#[test]
fn generate_writes_sized_deterministic_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let files = generate(a.path(), "grid", "--width", "8", "10");
    assert_eq!(files.len(), 10);
    for f in &files {
        assert_eq!(io::load(f).unwrap().n(), 64);
    }
    generate(b.path(), "grid", "--width", "8", "10");
    for f in &files {
        let name = Path::new(f).file_name().unwrap();
        assert_eq!(
            std::fs::read(f).unwrap(),
            std::fs::read(b.path().join(name)).unwrap()
        );
    }
    let g = generate(a.path(), "gabriel", "--n", "100", "2");
    assert_eq!(io::load(&g[0]).unwrap().n(), 100);
}

#[test]
fn relocate_reports_plan() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "grid", "--width", "8", "1");
    let (code, out) = run(&[
        "relocate",
        "--instance",
        &files[0],
        "--p",
        "6",
        "--method",
        "greedy",
    ]);
    assert_eq!(code, EXIT_OK);
    let q: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("Q"))
        .unwrap()
        .trim()
        .trim_end_matches('%')
        .parse()
        .unwrap();
    assert!(q > 0.0, "{out}");
    assert!(out.contains("budget      k = 3, T = 5"));

    let (code, out) = run(&[
        "relocate",
        "--instance",
        &files[0],
        "--p",
        "1",
        "--method",
        "vsca",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(
        out.contains("no move possible") && out.contains("Q           0.0000%"),
        "{out}"
    );

    let (code, out) = run(&[
        "relocate",
        "--instance",
        &files[0],
        "--f0",
        "0,9,18",
        "--k",
        "1",
        "--format",
        "rows",
    ]);
    assert_eq!(code, EXIT_OK);
    let plan: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(plan["base_facilities"], serde_json::json!([0, 9, 18]));
}

#[test]
fn solve_reports_gap_and_exact() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "gabriel", "--n", "10", "1");
    let (code, out) = run(&[
        "solve",
        "--instance",
        &files[0],
        "--p",
        "3",
        "--method",
        "exact",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("gap         0.0000%"), "{out}");
    let (code, out) = run(&[
        "solve",
        "--instance",
        &files[0],
        "--p",
        "3",
        "--method",
        "random",
        "--format",
        "rows",
    ]);
    assert_eq!(code, EXIT_OK);
    let r: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert!(r["gap"].as_f64().unwrap() >= 0.0);
    assert_eq!(r["method"], "random");
}

#[test]
fn oracle_cap_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "grid", "--width", "8", "1");
    let (code, _) = run(&[
        "solve",
        "--instance",
        &files[0],
        "--p",
        "6",
        "--method",
        "exact",
        "--cap",
        "1000",
    ]);
    assert_eq!(code, EXIT_INFEASIBLE);
    // Other methods just report the gap as unavailable.
    let (code, out) = run(&[
        "solve",
        "--instance",
        &files[0],
        "--p",
        "6",
        "--cap",
        "1000",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("n/a"));
    assert_eq!(
        run(&[
            "solve",
            "--instance",
            &files[0],
            "--p",
            "6",
            "--method",
            "nope"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["solve", "--instance", &files[0], "--p", "65"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["relocate", "--instance", &files[0], "--p", "2", "--k", "3"]).0,
        EXIT_USAGE
    );
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn policy_without_server_is_a_protocol_error() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "grid", "--width", "4", "1");
    let free = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .to_string();
    let endpoint = format!("tcp://{free}");
    let (code, _) = run(&[
        "relocate",
        "--instance",
        &files[0],
        "--p",
        "4",
        "--method",
        "policy",
        "--endpoint",
        &endpoint,
    ]);
    assert_eq!(code, EXIT_PROTOCOL);

    // Through the binary, to see the hint on stderr.
    let output = Command::new(env!("CARGO_BIN_EXE_swapfl"))
        .args([
            "relocate",
            "--instance",
            &files[0],
            "--p",
            "4",
            "--method",
            "policy",
        ])
        .env("SWAPFL_ENDPOINT", &endpoint)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_PROTOCOL));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(
        stderr.contains("start one") && stderr.contains(&free),
        "{stderr}"
    );
}

#[test]
fn bench_tables_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "grid", "--width", "5", "3");
    let corpus = dir.path().to_str().unwrap();
    let rows_path = dir.path().join("rows.jsonl");
    let (code, table) = run(&[
        "bench",
        "--corpus",
        corpus,
        "--task",
        "frp",
        "--p",
        "4",
        "--out",
        rows_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(table.lines().count(), 2 + 3);
    let report = BenchReport::from_rows(&std::fs::read_to_string(&rows_path).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert!(report
        .rows
        .iter()
        .all(|r| r.dataset == "Grid_25" && r.instances == 3 && r.value.is_some()));

    let args = [
        "bench", "--corpus", corpus, "--task", "pmp", "--p", "3", "--format", "rows",
    ];
    let (code, rows) = run(&args);
    assert_eq!(code, EXIT_OK);
    let first = BenchReport::from_rows(&rows).unwrap();
    assert_eq!(first.rows.len(), 7);
    assert!(first
        .rows
        .iter()
        .all(|r| r.value.is_some_and(|g| g >= -1e-9)));
    let second = BenchReport::from_rows(&run(&args).1).unwrap();
    for (a, b) in first.rows.iter().zip(&second.rows) {
        assert_eq!(
            (a.value, a.mean_objective, &a.method),
            (b.value, b.mean_objective, &b.method)
        );
    }

    let (code, _) = run(&[
        "bench",
        "--corpus",
        corpus,
        "--p",
        "3",
        "--methods",
        "greedy-swap,bogus",
    ]);
    assert_eq!(code, EXIT_USAGE);
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&[
            "bench",
            "--corpus",
            empty.path().to_str().unwrap(),
            "--p",
            "3"
        ])
        .0,
        EXIT_USAGE
    );
}

#[test]
fn export_record_and_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "gabriel", "--n", "60", "2");
    let lp = dir.path().join("model.lp");
    let (code, _) = run(&[
        "export-ilp",
        "--instance",
        &files[0],
        "--p",
        "4",
        "--out",
        lp.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&lp).unwrap();
    assert!(text.starts_with("\\ p-median model: n = 60, p = 4"));
    assert!(text.trim_end().ends_with("End"));

    let traj = dir.path().join("expert.jsonl");
    let (code, out) = run(&[
        "record-expert",
        "--corpus",
        dir.path().to_str().unwrap(),
        "--p",
        "6",
        "--out",
        traj.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(
        swapfl_core::rlenv::read_trajectory_file(&traj)
            .unwrap()
            .len(),
        2
    );

    let (code, out) = run(&["verify-scaling", "--instance", &files[0], "--p", "8"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("slope") && (out.contains("PASS") || out.contains("FAIL")));
    let (code, _) = run(&["verify-scaling", "--instance", &files[0], "--p", "2"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn serve_stdio_session() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_swapfl"))
        .args(["serve", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    writeln!(
        stdin,
        r#"{{"version":1,"type":"batch_generate","params":{{"kind":"grid","width":4,"count":1}}}}"#
    )
    .unwrap();
    writeln!(
        stdin,
        r#"{{"version":1,"type":"reset","instance_id":"inst-0","p":2}}"#
    )
    .unwrap();
    writeln!(stdin, r#"{{"version":1,"type":"shutdown"}}"#).unwrap();
    drop(stdin);
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let kinds: Vec<&str> = lines.iter().map(|l| l["type"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["instances", "observation", "bye"]);
}
