use std::path::Path;
use std::process::{Command, Output};

use qccd_shuttle::scheduler::ScheduleFile;

fn shuttle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shuttle")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn schedule_to(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "schedule",
        "--arch",
        "3,3,1,1",
        "--circuit",
        "builtin:ghz:6",
        "--seed",
        "2",
    ];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", path.to_str().unwrap()]);
    shuttle(&args)
}

#[test]
fn schedule_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    let out = schedule_to(&file, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("T_hat="));
    let v = shuttle(&["verify", file.to_str().unwrap()]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains("0 violation(s)"));
}

#[test]
fn schedule_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let bytes: Vec<Vec<u8>> = (0..3)
        .map(|i| {
            let file = dir.path().join(format!("s{i}.json"));
            assert_eq!(code(&schedule_to(&file, &["--duration-2q", "3"])), 0);
            std::fs::read(file).unwrap()
        })
        .collect();
    assert!(bytes.iter().all(|b| b == &bytes[0]));
}

#[test]
fn truncated_schedule_is_reported_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    assert_eq!(code(&schedule_to(&file, &[])), 0);
    let mut s = ScheduleFile::read(&file).unwrap();
    s.steps.pop();
    s.write(&file).unwrap();
    let v = shuttle(&["verify", "--json", file.to_str().unwrap()]);
    assert_eq!(code(&v), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(report["violations"][0]["rule"], "INCOMPLETE");
}

#[test]
fn oracle_witness_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let out = shuttle(&[
        "oracle",
        "--arch",
        "2,4,1,1",
        "--seed",
        "1",
        "--witness",
        w.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("T_min="));
    assert_eq!(code(&shuttle(&["verify", w.to_str().unwrap()])), 0);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let archs = dir.path().join("a.json");
    std::fs::write(&archs, r#"[{"m":2,"n":4,"v":1,"h":1}]"#).unwrap();
    let out = shuttle(&[
        "bench",
        "--archs",
        archs.to_str().unwrap(),
        "--families",
        "fra,qft",
        "--seeds",
        "0,1",
        "--oracle",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("type,m,n,v,h,occupancy,circuit"));
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qasm");
    std::fs::write(&bad, "OPENQASM 2.0;\nqreg q[2;\n").unwrap();
    let out = shuttle(&["schedule", "--arch", "3,3,1,1", "--circuit", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = shuttle(&["schedule", "--arch", "3,3,1,1", "--circuit", "builtin:nope:3"]);
    assert_eq!(code(&out), 3);
    let out = shuttle(&[
        "schedule",
        "--arch",
        "3,3,1,1",
        "--circuit",
        "builtin:fra:6",
        "--max-steps",
        "1",
    ]);
    assert_eq!(code(&out), 4);
    let out = shuttle(&[
        "schedule",
        "--arch",
        "3,3,1,1",
        "--circuit",
        "builtin:fra:6",
        "--occupancy",
        "1.0",
    ]);
    assert_eq!(code(&out), 5);
    let out = shuttle(&["oracle", "--arch", "3,3,1,1", "--budget", "10"]);
    assert_eq!(code(&out), 6);
}
