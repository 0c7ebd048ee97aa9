use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use minergy::NetworkInstance;
use minergy_cli::instance_file::{parse, serialize};
use proptest::prelude::*;

fn minergy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minergy"))
        .args(args)
        .env_remove("MINERGY_ORACLE_CAP")
        .output()
        .expect("run minergy")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_monomial_and_two_term() {
    let dir = tempfile::tempdir().unwrap();
    let r3 = write(dir.path(), "r3", "regular 3 1\n");
    let out = minergy(&["solve", path_str(&r3), "--a", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("graph T0\nenergy 6\ncertified true\n"), "{text}");
    assert!(text.contains("edge 1 0 3\nedge 2 1 2\nedge 3 2 1\n"));

    let r4 = write(dir.path(), "r4", "regular 4 1\n");
    let out = minergy(&["solve", path_str(&r4), "--a", "2", "--b", "0", "--lambda", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("graph T0\n"));

    let out = minergy(&["solve", path_str(&r4), "--gain", "mono:-2"]);
    assert!(stdout(&out).starts_with("graph T2(1)\nenergy 0.597222222222\n"), "{}", stdout(&out));
}

#[test]
fn gap_region_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let r4 = write(dir.path(), "r4", "regular 4 1\n");
    // between lambda_0 = 2 and lambda_0' = 8
    let out = minergy(&["solve", path_str(&r4), "--a", "2", "--b", "0", "--lambda", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("certified false"));
}

#[test]
fn input_errors_exit_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad", "# header\n3\n1 1\n3 1\n2 1\n");
    let out = minergy(&["solve", path_str(&bad), "--a", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));

    let r3 = write(dir.path(), "r3", "regular 3 1\n");
    assert_eq!(minergy(&["solve", path_str(&r3)]).status.code(), Some(1));
    assert_eq!(minergy(&["solve", path_str(&r3), "--a", "1", "--b", "0"]).status.code(), Some(1));
    assert_eq!(minergy(&["solve", path_str(&r3), "--a", "x"]).status.code(), Some(1));
    assert_eq!(minergy(&["solve", "/nonexistent/file", "--a", "2"]).status.code(), Some(1));
    assert_eq!(minergy(&["bogus"]).status.code(), Some(1));
}

#[test]
fn thresholds_table() {
    let dir = tempfile::tempdir().unwrap();
    let r3 = write(dir.path(), "r3", "regular 3 1\n");
    let text = stdout(&minergy(&["thresholds", path_str(&r3)]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,k,value,residual,status");
    assert!(lines[1].starts_with("a_1,1,-0.787884911026,"));

    let r4 = write(dir.path(), "r4", "regular 4 1\n");
    let text = stdout(&minergy(&["thresholds", path_str(&r4), "--a", "2", "--b", "0"]));
    assert!(text.contains("\nlambda_0,0,2,0,ok\n"), "{text}");

    let r2 = write(dir.path(), "r2", "regular 2 1\n");
    let text = stdout(&minergy(&["thresholds", path_str(&r2)]));
    assert_eq!(text, "kind,k,value,residual,status\n");
}

#[test]
fn sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let r3 = write(dir.path(), "r3", "regular 3 1\n");
    let text = stdout(&minergy(&["sweep", path_str(&r3), "--a-range", "-2:2", "--step", "0.25"]));
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 17);
    let graph_at = |a: &str| rows.iter().find(|r| r[0] == a).unwrap()[1];
    assert_eq!(graph_at("-1"), "T2(1)");
    assert_eq!(graph_at("-0.75"), "T1");
    assert_eq!(graph_at("0.75"), "T1");
    assert_eq!(graph_at("1"), "T0");

    let r4 = write(dir.path(), "r4", "regular 4 1\n");
    let text = stdout(&minergy(&[
        "sweep", path_str(&r4), "--a", "2", "--b", "0", "--lambda-range", "0:4", "--step", "0.5",
    ]));
    let graphs: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(graphs[..5].iter().all(|g| *g == "T0"));
    assert_ne!(graphs[5], "T0");

    let text = stdout(&minergy(&[
        "sweep", path_str(&r4), "--a", "0.5", "--b", "0.5", "--lambda-range", "0:3", "--step", "1",
    ]));
    let graphs: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(graphs.iter().all(|g| *g == graphs[0]));

    let out = minergy(&["sweep", path_str(&r4), "--a-range", "1:0", "--step", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let r6 = write(dir.path(), "r6", "regular 6 1\n");
    let args = ["sweep", path_str(&r6), "--a-range", "-3:3", "--step", "0.05"];
    assert_eq!(minergy(&args).stdout, minergy(&args).stdout);
}

#[test]
fn oracle_reports() {
    let dir = tempfile::tempdir().unwrap();
    let r3 = write(dir.path(), "r3", "regular 3 1\n");
    let text = stdout(&minergy(&["oracle", path_str(&r3), "--a", "2"]));
    assert!(text.starts_with("oracle_energy 6\n"));
    assert!(text.ends_with("verdict agrees\n"));
    let text = stdout(&minergy(&["oracle", path_str(&r3), "--a", "1"]));
    assert!(text.contains("argmin_count 6\n"), "{text}");

    let r9 = write(dir.path(), "r9", "regular 9 1\n");
    assert_eq!(minergy(&["oracle", path_str(&r9), "--a", "2"]).status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_minergy"))
        .args(["oracle", path_str(&r3), "--a", "2"])
        .env("MINERGY_ORACLE_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sinr_schedule_csv() {
    let dir = tempfile::tempdir().unwrap();
    let r2 = write(dir.path(), "r2", "regular 2 1\n");
    let out = minergy(&["sinr-schedule", path_str(&r2), "--a", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "sender,receiver,start,end,rate,amount,slot_energy\n2,1,0,1,1,1,1\n1,0,1,3,1,2,2\n"
    );
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("total_energy 3\n"));

    let out = minergy(&["sinr-schedule", path_str(&r2), "--a", "2", "--p0", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

proptest! {
    #[test]
    fn instance_files_round_trip(gaps in prop::collection::vec(1e-6f64..100.0, 1..12), seed in 1e-9f64..1e3) {
        let mut x = 0.0;
        let positions: Vec<f64> = gaps.iter().map(|g| { x += g; x }).collect();
        let data: Vec<f64> = (0..positions.len()).map(|i| seed * (i + 1) as f64).collect();
        let inst = NetworkInstance::new(positions, data).unwrap();
        prop_assert_eq!(parse(&serialize(&inst)).unwrap(), inst);
    }
}
