//! Reference scenarios, backcasts and Pareto sweeps over loaded inputs.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fleet::{self, PolicyTrajectory, ScenarioResult};
use crate::io::Inputs;
use crate::ocp::{self, OcpProblem, SolveReport, SolverOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    /// I0: no incentive.
    NoIncentive,
    /// IC: constant incentive in euro.
    ConstantIncentive(f64),
    /// IP: incentive equal to the EV purchase price.
    FullPrice,
    /// BI: no thermal sales from the first simulated year.
    Ban,
    /// Least-cost incentive meeting a cumulative emissions cap (Gt).
    Optimal {
        target_gt: f64,
    },
    ParetoSweep {
        targets_gt: Vec<f64>,
    },
}

impl ScenarioSpec {
    /// Parses `I0`, `IC`, `IC:<euro>`, `IP` or `BI`; bare `IC` uses
    /// `ic_amount`.
    pub fn parse(s: &str, ic_amount: f64) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let spec = match upper.as_str() {
            "I0" => ScenarioSpec::NoIncentive,
            "IC" => ScenarioSpec::ConstantIncentive(ic_amount),
            "IP" => ScenarioSpec::FullPrice,
            "BI" => ScenarioSpec::Ban,
            other => match other.strip_prefix("IC:") {
                Some(x) => {
                    let amount: f64 = x
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("invalid IC amount `{x}`")))?;
                    ScenarioSpec::ConstantIncentive(amount)
                }
                None => {
                    return Err(Error::InvalidInput(format!(
                        "unknown scenario `{s}` (expected I0, IC, IC:<euro>, IP or BI)"
                    )))
                }
            },
        };
        if let ScenarioSpec::ConstantIncentive(a) = spec {
            if !(a >= 0.0) {
                return Err(Error::InvalidInput(format!("IC amount {a} must be >= 0")));
            }
        }
        Ok(spec)
    }

    pub fn label(&self) -> String {
        match self {
            ScenarioSpec::NoIncentive => "I0".into(),
            ScenarioSpec::ConstantIncentive(_) => "IC".into(),
            ScenarioSpec::FullPrice => "IP".into(),
            ScenarioSpec::Ban => "BI".into(),
            ScenarioSpec::Optimal { .. } => "optimal".into(),
            ScenarioSpec::ParetoSweep { .. } => "pareto".into(),
        }
    }
}

/// Headline numbers of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub scenario: String,
    pub last_year: i32,
    pub terminal_gt: f64,
    pub budget_geur: f64,
    /// EV stock in the final year, vehicles.
    pub ev_stock: f64,
}

impl Summary {
    pub fn of(scenario: &str, result: &ScenarioResult) -> Self {
        let last = result.records.last().expect("trajectory has at least t0");
        Self {
            scenario: scenario.to_string(),
            last_year: last.year,
            terminal_gt: result.terminal_emissions_gt(),
            budget_geur: result.total_budget_geur(),
            ev_stock: last.stock.electric,
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: cumulative emissions {} = {} Gt, incentive budget {} G€, EV stock {} M",
            self.scenario,
            self.last_year,
            sig6(self.terminal_gt),
            sig6(self.budget_geur),
            sig6(self.ev_stock / 1e6)
        )
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub summary: Summary,
    pub result: ScenarioResult,
    pub solve: Option<SolveReport>,
}

pub fn problem(inputs: &Inputs, target_gt: f64) -> Result<OcpProblem> {
    OcpProblem::new(
        inputs.initial.clone(),
        inputs.exo.clone(),
        inputs.params.clone(),
        inputs.last_year,
        target_gt,
    )
}

pub fn run_scenario(
    spec: &ScenarioSpec,
    inputs: &Inputs,
    opts: &SolverOptions,
) -> Result<ScenarioRun> {
    let first = inputs.first_year + 1;
    let last = inputs.last_year;
    let sim = |policy: PolicyTrajectory| {
        fleet::simulate(&inputs.initial, &policy, &inputs.exo, &inputs.params)
    };
    let (result, solve) = match spec {
        ScenarioSpec::NoIncentive => (sim(PolicyTrajectory::constant(first, last, 0.0))?, None),
        ScenarioSpec::ConstantIncentive(a) => {
            let policy = PolicyTrajectory::constant(first, last, *a);
            policy.check_bounds(&inputs.exo)?;
            (sim(policy)?, None)
        }
        ScenarioSpec::FullPrice => (
            sim(PolicyTrajectory::full_price(first, last, &inputs.exo)?)?,
            None,
        ),
        ScenarioSpec::Ban => (
            fleet::simulate_ban(&inputs.initial, last, &inputs.exo, &inputs.params)?,
            None,
        ),
        ScenarioSpec::Optimal { target_gt } => {
            let report = ocp::solve(&problem(inputs, *target_gt)?, opts)?;
            (report.trajectory.clone(), Some(report))
        }
        ScenarioSpec::ParetoSweep { .. } => {
            return Err(Error::InvalidInput(
                "a Pareto sweep produces a frontier, use pareto_sweep".into(),
            ))
        }
    };
    Ok(ScenarioRun {
        summary: Summary::of(&spec.label(), &result),
        result,
        solve,
    })
}

#[derive(Debug)]
pub struct ParetoPoint {
    pub target_gt: f64,
    pub outcome: Result<Summary>,
}

#[derive(Debug)]
pub struct ParetoFrontier {
    /// Sorted by increasing target.
    pub points: Vec<ParetoPoint>,
}

impl ParetoFrontier {
    /// Successful `(ℰ(T), I(T))` pairs in increasing `ℰ(T)`.
    pub fn solved(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.outcome.as_ref().ok())
            .map(|s| (s.terminal_gt, s.budget_geur))
            .collect()
    }

    /// Lower emissions must cost strictly more. Points within `tol_gt` of
    /// each other in emissions are not compared.
    pub fn is_monotone(&self, tol_gt: f64) -> bool {
        let pts = self.solved();
        pts.windows(2)
            .all(|w| w[1].0 - w[0].0 <= tol_gt || w[0].1 > w[1].1)
    }
}

/// Solves one backcast per target, `workers` at a time (0 uses every core).
/// Failures are kept per target and do not stop the sweep.
pub fn pareto_sweep(
    inputs: &Inputs,
    targets_gt: &[f64],
    opts: &SolverOptions,
    workers: usize,
) -> Result<ParetoFrontier> {
    let mut targets = targets_gt.to_vec();
    targets.sort_by(f64::total_cmp);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start {workers} workers: {e}")))?;
    let points = pool.install(|| {
        targets
            .par_iter()
            .map(|&t| ParetoPoint {
                target_gt: t,
                outcome: run_scenario(&ScenarioSpec::Optimal { target_gt: t }, inputs, opts)
                    .map(|r| Summary::of(&format!("target {t}"), &r.result)),
            })
            .collect()
    });
    Ok(ParetoFrontier { points })
}

/// Formats with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub const TRAJECTORY_HEADER: &str = "year,incentive_eur,sales_thermal,sales_electric,\
stock_thermal,stock_electric,thermal_share,emissions_mt,cumulative_gt,budget_geur";

/// Per-year CSV of a trajectory. The thermal share is empty for `t0`.
pub fn write_trajectory_csv(path: &Path, result: &ScenarioResult) -> Result<()> {
    let mut f = create(path)?;
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for r in &result.records {
        let share = if r.thermal_share.is_nan() {
            String::new()
        } else {
            sig6(r.thermal_share)
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.year,
            sig6(r.incentive_eur),
            sig6(r.sales.thermal),
            sig6(r.sales.electric),
            sig6(r.stock.thermal),
            sig6(r.stock.electric),
            share,
            sig6(r.emissions_mt),
            sig6(r.cumulative_gt),
            sig6(r.budget_geur),
        ));
    }
    f.write_all(out.as_bytes()).map_err(io_err(path))
}

pub fn write_pareto_csv(path: &Path, frontier: &ParetoFrontier) -> Result<()> {
    let mut f = create(path)?;
    let mut out = String::from("target_gt,cumulative_gt,budget_geur,status\n");
    for p in &frontier.points {
        match &p.outcome {
            Ok(s) => out.push_str(&format!(
                "{},{},{},ok\n",
                sig6(p.target_gt),
                sig6(s.terminal_gt),
                sig6(s.budget_geur)
            )),
            Err(e) => out.push_str(&format!(
                "{},,,\"{}\"\n",
                sig6(p.target_gt),
                e.to_string().replace('"', "'")
            )),
        }
    }
    f.write_all(out.as_bytes()).map_err(io_err(path))
}
