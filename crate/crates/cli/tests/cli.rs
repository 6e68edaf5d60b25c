use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/france/config.toml")
}

fn backcast(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backcast"))
        .args(args)
        .arg("--config")
        .arg(config())
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_all_writes_one_file_per_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = backcast(&["simulate"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["I0.csv", "IC.csv", "IP.csv", "BI.csv", "summary.csv"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert!(stdout(&o).contains("IC: cumulative emissions 2050 = 0.917042 Gt"));
}

#[test]
fn repeated_runs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert!(
            backcast(&["backcast", "--match-scenario", "IC"], dir.path())
                .status
                .success()
        );
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("optimal.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn backcast_matching_constant_incentive() {
    let dir = tempfile::tempdir().unwrap();
    let o = backcast(&["backcast", "--match-scenario", "IC"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("optimal: cumulative emissions 2050 = 0.917042 Gt"),
        "{text}"
    );
    assert!(text.contains("incentive budget 95.3"), "{text}");
    let csv = fs::read_to_string(dir.path().join("optimal.csv")).unwrap();
    let row_2023 = csv.lines().find(|l| l.starts_with("2023,")).unwrap();
    let u: f64 = row_2023.split(',').nth(1).unwrap().parse().unwrap();
    assert!((u - 16_027.0).abs() < 5.0, "{u}");
}

#[test]
fn infeasible_target_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = backcast(&["backcast", "--target-gt", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not achievable"));
}

#[test]
fn bad_input_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_backcast"))
        .args(["simulate", "--config"])
        .arg(dir.path().join("missing.toml"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn pareto_writes_sorted_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let o = backcast(
        &["pareto", "--target-gt", "0.9,0.8,0.5", "--workers", "2"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("pareto.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "target_gt,cumulative_gt,budget_geur,status");
    assert!(lines[1].starts_with("0.5,,,"));
    assert!(lines[2].starts_with("0.8,") && lines[2].ends_with(",ok"));
    assert!(lines[3].starts_with("0.9,") && lines[3].ends_with(",ok"));
}

#[test]
fn calibrate_writes_parameter_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = backcast(&["calibrate"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in [
        "survival.csv",
        "mileage_history.csv",
        "params.toml",
        "initial_fleet.csv",
    ] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let mileage = fs::read_to_string(dir.path().join("mileage_history.csv")).unwrap();
    assert!(
        mileage.lines().any(|l| l.starts_with("2020,1130")),
        "{mileage}"
    );
    let params = fs::read_to_string(dir.path().join("params.toml")).unwrap();
    assert!(params.contains("schema_version = 1"));
}
