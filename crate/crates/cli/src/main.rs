use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fleet_backcast::calibration::{self, EvSalesRecord};
use fleet_backcast::io::{self, load_inputs, ParamsFile, RunConfig};
use fleet_backcast::ocp::SolverOptions;
use fleet_backcast::scenario::{
    pareto_sweep, run_scenario, sig6, write_pareto_csv, write_trajectory_csv, ScenarioSpec, Summary,
};
use fleet_backcast::Error;
use log::{info, warn};

#[derive(Parser)]
#[command(
    name = "backcast",
    version,
    about = "Fleet emissions simulation and EV incentive backcasting"
)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; defaults to the one in the configuration.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct Tolerances {
    /// Accepted |E(T) - target| in Gt.
    #[arg(long)]
    tol_emissions: Option<f64>,

    /// Projected-gradient tolerance relative to the initial guess.
    #[arg(long)]
    tol_grad: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate reference scenarios (I0, IC, IC:<euro>, IP, BI or all).
    Simulate {
        #[command(flatten)]
        common: Common,

        #[arg(long, default_value = "all")]
        scenario: String,
    },
    /// Least-cost incentive trajectory for an emissions cap.
    Backcast {
        #[command(flatten)]
        common: Common,

        #[command(flatten)]
        tol: Tolerances,

        /// Cumulative emissions cap at the horizon end, Gt.
        #[arg(long, conflicts_with = "match_scenario")]
        target_gt: Option<f64>,

        /// Use the terminal emissions of a reference scenario as the cap.
        #[arg(long)]
        match_scenario: Option<String>,
    },
    /// Solve a backcast for each target and write the frontier.
    Pareto {
        #[command(flatten)]
        common: Common,

        #[command(flatten)]
        tol: Tolerances,

        /// Comma-separated caps in Gt; defaults to the configuration.
        #[arg(long, value_delimiter = ',')]
        target_gt: Option<Vec<f64>>,

        /// Concurrent solves (0 uses every core).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Estimate survival, mileage and Bass parameters from history files.
    Calibrate {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::InfeasibleTarget { .. }) => 2,
        Some(
            Error::Data { .. }
            | Error::Io { .. }
            | Error::InvalidInput(_)
            | Error::YearOutOfRange { .. },
        ) => 3,
        Some(Error::NonConvergence { .. }) => 4,
        _ => 1,
    }
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf)> {
    let cfg = RunConfig::read(&common.config)?;
    let out = common.out_dir.clone().unwrap_or_else(|| cfg.output_dir());
    Ok((cfg, out))
}

fn solver_options(cfg: &RunConfig, tol: &Tolerances) -> Result<SolverOptions> {
    let mut opts: SolverOptions = cfg.solver.into();
    if let Some(t) = tol.tol_emissions {
        opts.tol_emissions_gt = t;
    }
    if let Some(t) = tol.tol_grad {
        opts.tol_grad = t;
    }
    if !(opts.tol_emissions_gt > 0.0 && opts.tol_grad > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive".into()).into());
    }
    Ok(opts)
}

fn summary_csv(path: &Path, rows: &[Summary]) -> Result<()> {
    let mut out = String::from("scenario,last_year,cumulative_gt,budget_geur,ev_stock\n");
    for s in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.scenario,
            s.last_year,
            sig6(s.terminal_gt),
            sig6(s.budget_geur),
            sig6(s.ev_stock)
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { common, scenario } => {
            let (cfg, out) = load(&common)?;
            let inputs = load_inputs(&cfg)?;
            let labels: Vec<String> = if scenario.eq_ignore_ascii_case("all") {
                ["I0", "IC", "IP", "BI"].map(String::from).to_vec()
            } else {
                scenario.split(',').map(|s| s.trim().to_string()).collect()
            };
            let mut rows = Vec::new();
            for label in labels {
                let spec = ScenarioSpec::parse(&label, cfg.scenarios.ic_amount)?;
                let started = Instant::now();
                let run = run_scenario(&spec, &inputs, &SolverOptions::default())?;
                info!("{} simulated in {:?}", spec.label(), started.elapsed());
                let file = out.join(format!("{}.csv", spec.label()));
                write_trajectory_csv(&file, &run.result)?;
                println!("{}", run.summary);
                rows.push(run.summary);
            }
            summary_csv(&out.join("summary.csv"), &rows)
        }
        Command::Backcast {
            common,
            tol,
            target_gt,
            match_scenario,
        } => {
            let (cfg, out) = load(&common)?;
            let inputs = load_inputs(&cfg)?;
            let opts = solver_options(&cfg, &tol)?;
            let target = match (target_gt, match_scenario) {
                (Some(t), _) => t,
                (None, Some(label)) => {
                    let spec = ScenarioSpec::parse(&label, cfg.scenarios.ic_amount)?;
                    let reference = run_scenario(&spec, &inputs, &opts)?;
                    println!("{}", reference.summary);
                    reference.summary.terminal_gt
                }
                (None, None) => bail!("either --target-gt or --match-scenario is required"),
            };
            let started = Instant::now();
            let run = run_scenario(&ScenarioSpec::Optimal { target_gt: target }, &inputs, &opts)?;
            let report = run
                .solve
                .as_ref()
                .expect("optimal runs carry a solver report");
            info!("backcast solved in {:?}", started.elapsed());
            write_trajectory_csv(&out.join("optimal.csv"), &run.result)?;
            summary_csv(&out.join("summary.csv"), std::slice::from_ref(&run.summary))?;
            println!("{}", run.summary);
            println!(
                "target {} Gt, multiplier {} €/Gt, {} outer / {} inner iterations, constraint residual {:.3e} Gt, stationarity {:.3e}",
                sig6(target),
                sig6(report.nu),
                report.outer_iterations,
                report.inner_iterations,
                report.constraint_residual,
                report.stationarity_residual
            );
            Ok(())
        }
        Command::Pareto {
            common,
            tol,
            target_gt,
            workers,
        } => {
            let (cfg, out) = load(&common)?;
            let inputs = load_inputs(&cfg)?;
            let opts = solver_options(&cfg, &tol)?;
            let targets = target_gt.unwrap_or_else(|| cfg.scenarios.pareto_targets.clone());
            if targets.is_empty() {
                bail!("no Pareto targets given");
            }
            let workers = workers.unwrap_or(cfg.scenarios.workers);
            let started = Instant::now();
            let frontier = pareto_sweep(&inputs, &targets, &opts, workers)?;
            info!(
                "sweep of {} targets took {:?}",
                targets.len(),
                started.elapsed()
            );
            write_pareto_csv(&out.join("pareto.csv"), &frontier)?;
            for p in &frontier.points {
                match &p.outcome {
                    Ok(s) => println!(
                        "target {} Gt: cumulative {} Gt, budget {} G€",
                        sig6(p.target_gt),
                        sig6(s.terminal_gt),
                        sig6(s.budget_geur)
                    ),
                    Err(e) => println!("target {} Gt: failed: {e}", sig6(p.target_gt)),
                }
            }
            if !frontier.is_monotone(opts.tol_emissions_gt) {
                warn!("frontier is not strictly monotone");
            }
            Ok(())
        }
        Command::Calibrate { common } => {
            let (cfg, out) = load(&common)?;
            calibrate(&cfg, &out)
        }
    }
}

fn calibrate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let d = &cfg.data;
    let need = |p: &Option<PathBuf>, what: &str| -> Result<PathBuf> {
        p.as_ref()
            .map(|p| cfg.resolve(p))
            .ok_or_else(|| Error::InvalidInput(format!("calibration needs `data.{what}`")).into())
    };
    let stocks = io::read_stock_history(&need(&d.stock_history, "stock_history")?)?;
    let emissions = io::read_emissions_history(&need(&d.emissions_history, "emissions_history")?)?;
    let sales: Vec<EvSalesRecord> = io::read_ev_sales(&need(&d.ev_sales_share, "ev_sales_share")?)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let t0 = cfg.horizon.first_year;
    let survival = calibration::survival_from_stocks(&stocks, t0 - 1, t0)?;
    let mut text = String::from("age,value\n");
    for (a, eta) in &survival {
        text.push_str(&format!("{a},{}\n", sig6(*eta)));
    }
    fs::write(out.join("survival.csv"), text)?;
    if let Some((a, eta)) = survival.last() {
        println!(
            "survival: {} ages, eta_{a} = {}",
            survival.len(),
            sig6(*eta)
        );
    }

    let mileage =
        calibration::mileage_from_emissions(&stocks, &emissions, calibration::emission_factor_new)?;
    let mut text = String::from("year,value\n");
    for (year, m) in mileage.by_year.iter() {
        text.push_str(&format!("{year},{}\n", sig6(m)));
    }
    fs::write(out.join("mileage_history.csv"), text)?;
    println!("mileage: average {} km/y", sig6(mileage.average));

    let fit = calibration::fit_bass(&sales)?;
    println!(
        "bass: p = {}, q = {} (sse {:.3e})",
        sig6(fit.params.innovation),
        sig6(fit.params.imitation),
        fit.sse
    );
    let mut params = ParamsFile::read(&cfg.resolve(&d.params))?;
    params.bass.innovation = fit.params.innovation;
    params.bass.imitation = fit.params.imitation;
    params.bass.start_year = sales
        .iter()
        .map(|s| s.year)
        .min()
        .unwrap_or(params.bass.start_year);
    params.age_classes = survival.last().map_or(params.age_classes, |s| s.0);
    fs::write(out.join("params.toml"), params.to_toml())?;

    let fleet = calibration::initial_fleet(&stocks, t0)?;
    let mut text = String::from("type,age,count\n");
    for v in fleet_backcast::VehicleType::ALL {
        for (a, c) in fleet.stocks.get(v).iter().enumerate() {
            text.push_str(&format!("{v},{a},{c}\n"));
        }
    }
    fs::write(out.join("initial_fleet.csv"), text)?;
    println!(
        "initial fleet {t0}: {} thermal, {} electric",
        sig6(fleet.total_of(fleet_backcast::VehicleType::Thermal)),
        sig6(fleet.total_of(fleet_backcast::VehicleType::Electric))
    );
    Ok(())
}
