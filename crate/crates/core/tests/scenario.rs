mod common;

use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use fleet_backcast::scenario::{
    pareto_sweep, run_scenario, write_pareto_csv, write_trajectory_csv,
};
use fleet_backcast::{load_inputs, Error, Inputs, RunConfig, ScenarioSpec, SolverOptions};

fn france() -> &'static Inputs {
    static INPUTS: OnceLock<Inputs> = OnceLock::new();
    INPUTS.get_or_init(common::france)
}

/// Copies the France fixtures into a scratch directory so a test can break
/// one file.
fn scratch_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let src = common::france_config_path();
    for entry in fs::read_dir(src.parent().unwrap()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    dir
}

fn load(dir: &Path) -> fleet_backcast::Result<Inputs> {
    load_inputs(&RunConfig::read(&dir.join("config.toml"))?)
}

fn replace_in(path: &Path, from: &str, to: &str) {
    let text = fs::read_to_string(path).unwrap();
    assert!(text.contains(from), "{from} not in {}", path.display());
    fs::write(path, text.replacen(from, to, 1)).unwrap();
}

#[test]
fn scenario_labels_parse() {
    assert_eq!(
        ScenarioSpec::parse("i0", 5e3).unwrap(),
        ScenarioSpec::NoIncentive
    );
    assert_eq!(
        ScenarioSpec::parse("IC", 5e3).unwrap(),
        ScenarioSpec::ConstantIncentive(5e3)
    );
    assert_eq!(
        ScenarioSpec::parse("IC:2500", 5e3).unwrap(),
        ScenarioSpec::ConstantIncentive(2.5e3)
    );
    assert_eq!(ScenarioSpec::parse("BI", 5e3).unwrap().label(), "BI");
    assert!(ScenarioSpec::parse("IC:-1", 5e3).is_err());
    assert!(ScenarioSpec::parse("XX", 5e3).is_err());
}

#[test]
fn scratch_copy_loads() {
    let dir = scratch_copy();
    let inputs = load(dir.path()).unwrap();
    assert_eq!(inputs.first_year, 2022);
    assert_eq!(inputs.last_year, 2050);
    assert_eq!(inputs.initial.age_classes(), 30);
}

#[test]
fn wrong_schema_version_is_rejected() {
    let dir = scratch_copy();
    replace_in(
        &dir.path().join("config.toml"),
        "schema_version = 1",
        "schema_version = 7",
    );
    let err = load(dir.path()).unwrap_err();
    assert!(matches!(err, Error::Data { .. }), "{err}");
    assert!(err.to_string().contains("schema_version 7"));
}

#[test]
fn malformed_csv_reports_file_and_line() {
    let dir = scratch_copy();
    replace_in(&dir.path().join("mileage.csv"), "2024,13500", "2024,lots");
    let err = load(dir.path()).unwrap_err();
    match &err {
        Error::Data { path, line, .. } => {
            assert!(path.ends_with("mileage.csv"));
            assert_eq!(*line, 4);
        }
        other => panic!("expected a data error, got {other}"),
    }
}

#[test]
fn missing_fixture_is_an_io_error() {
    let dir = scratch_copy();
    fs::remove_file(dir.path().join("demand.csv")).unwrap();
    assert!(matches!(load(dir.path()).unwrap_err(), Error::Io { .. }));
}

#[test]
fn short_series_is_rejected() {
    let dir = scratch_copy();
    let path = dir.path().join("demand.csv");
    let text = fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with("2050")).collect();
    fs::write(&path, kept.join("\n")).unwrap();
    assert!(load(dir.path()).is_err());
}

#[test]
fn reference_scenarios_are_ordered() {
    let opts = SolverOptions::default();
    let run =
        |s: &str| run_scenario(&ScenarioSpec::parse(s, 5e3).unwrap(), france(), &opts).unwrap();
    let (i0, ic, ip, bi) = (run("I0"), run("IC"), run("IP"), run("BI"));
    assert!(i0.summary.terminal_gt >= ic.summary.terminal_gt);
    assert!(ic.summary.terminal_gt >= ip.summary.terminal_gt);
    assert!(ip.summary.terminal_gt >= bi.summary.terminal_gt);
    assert_eq!(i0.summary.budget_geur, 0.0);
    assert!(ic.summary.budget_geur < ip.summary.budget_geur);
    assert!(ic.solve.is_none());
}

#[test]
fn optimal_scenario_reports_solver_details() {
    let opts = SolverOptions::default();
    let ic = run_scenario(&ScenarioSpec::ConstantIncentive(5e3), france(), &opts).unwrap();
    let spec = ScenarioSpec::Optimal {
        target_gt: ic.summary.terminal_gt,
    };
    let run = run_scenario(&spec, france(), &opts).unwrap();
    let report = run.solve.expect("optimal run carries a solver report");
    assert!(report.constraint_residual.abs() < 1e-3);
    assert!(run.summary.budget_geur < ic.summary.budget_geur);
}

#[test]
fn pareto_sweep_is_sorted_and_monotone() {
    let targets = [0.91, 0.73, 0.98, 0.82, 0.5];
    let frontier = pareto_sweep(france(), &targets, &SolverOptions::default(), 2).unwrap();
    let order: Vec<f64> = frontier.points.iter().map(|p| p.target_gt).collect();
    assert_eq!(order, vec![0.5, 0.73, 0.82, 0.91, 0.98]);
    assert!(matches!(
        frontier.points[0].outcome,
        Err(Error::InfeasibleTarget { .. })
    ));
    assert_eq!(frontier.solved().len(), 4);
    assert!(frontier.is_monotone(1e-3));
}

#[test]
fn outputs_are_deterministic() {
    let opts = SolverOptions::default();
    let dir = tempfile::tempdir().unwrap();
    let mut csv = Vec::new();
    for (k, workers) in [(0, 1), (1, 3)] {
        let run = run_scenario(&ScenarioSpec::Optimal { target_gt: 0.9 }, france(), &opts).unwrap();
        let path = dir.path().join(format!("optimal{k}.csv"));
        write_trajectory_csv(&path, &run.result).unwrap();
        let frontier = pareto_sweep(france(), &[0.8, 0.9], &opts, workers).unwrap();
        let pareto = dir.path().join(format!("pareto{k}.csv"));
        write_pareto_csv(&pareto, &frontier).unwrap();
        csv.push((fs::read(&path).unwrap(), fs::read(&pareto).unwrap()));
    }
    assert_eq!(csv[0], csv[1]);
    let text = String::from_utf8(csv[0].0.clone()).unwrap();
    assert_eq!(text.lines().count(), 30);
    assert!(text.lines().nth(1).unwrap().starts_with("2022,0,0,0,"));
}
