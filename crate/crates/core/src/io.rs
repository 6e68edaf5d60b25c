//! CSV fixtures and TOML parameter/run-configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::calibration::{
    EvSalesRecord, HistoricalEmissionsRecord, HistoricalStockRecord, Ownership,
};
use crate::error::{Error, Result};
use crate::fleet::{
    bass_adoption, BassParams, EmissionFactorTable, ExogenousSeries, FleetState, LogitWeights,
    ModelParams, PerType, VehicleType,
};
use crate::ocp::SolverOptions;
use crate::series::YearSeries;
use crate::units;

pub const SCHEMA_VERSION: u32 = 1;

/// Reads a headed CSV file into typed rows, each tagged with its line.
fn read_rows<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<(usize, T)>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let found = reader
        .headers()
        .map_err(|e| Error::data(path, 1, e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::data(
            path,
            1,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::data(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row: T = record
            .deserialize(Some(&found))
            .map_err(|e| Error::data(path, line, e.to_string()))?;
        rows.push((line, row));
    }
    if rows.is_empty() {
        return Err(Error::data(path, 1, "no data rows"));
    }
    Ok(rows)
}

fn check_finite(path: &Path, line: usize, what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::data(
            path,
            line,
            format!("{what} is not a finite number"),
        ))
    }
}

fn contiguous(path: &Path, name: &str, rows: Vec<(usize, i32, f64)>) -> Result<YearSeries> {
    let first = rows[0].1;
    let mut values = Vec::with_capacity(rows.len());
    for (i, (line, year, value)) in rows.into_iter().enumerate() {
        if year != first + i as i32 {
            return Err(Error::data(
                path,
                line,
                format!("expected year {}, found {year}", first + i as i32),
            ));
        }
        check_finite(path, line, "value", value)?;
        values.push(value);
    }
    Ok(YearSeries::new(name, first, values))
}

#[derive(Deserialize)]
struct YearValue {
    year: i32,
    value: f64,
}

/// `year,value` series with consecutive years.
pub fn read_year_series(path: &Path, name: &str) -> Result<YearSeries> {
    let rows = read_rows::<YearValue>(path, &["year", "value"])?;
    contiguous(
        path,
        name,
        rows.into_iter()
            .map(|(l, r)| (l, r.year, r.value))
            .collect(),
    )
}

#[derive(Deserialize)]
struct YearCosts {
    year: i32,
    thermal: f64,
    electric: f64,
}

/// `year,thermal,electric` cost table.
pub fn read_cost_table(path: &Path, name: &str) -> Result<PerType<YearSeries>> {
    let rows = read_rows::<YearCosts>(path, &["year", "thermal", "electric"])?;
    let thermal = rows.iter().map(|(l, r)| (*l, r.year, r.thermal)).collect();
    let electric = rows.iter().map(|(l, r)| (*l, r.year, r.electric)).collect();
    Ok(PerType::new(
        contiguous(path, &format!("{name}_thermal"), thermal)?,
        contiguous(path, &format!("{name}_electric"), electric)?,
    ))
}

#[derive(Deserialize)]
struct AgeValue {
    age: usize,
    value: f64,
}

/// `age,value` table for ages `1..=A`; returns the values in age order.
pub fn read_age_series(path: &Path) -> Result<Vec<f64>> {
    let rows = read_rows::<AgeValue>(path, &["age", "value"])?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, (line, r)) in rows.into_iter().enumerate() {
        if r.age != i + 1 {
            return Err(Error::data(
                path,
                line,
                format!("expected age {}, found {}", i + 1, r.age),
            ));
        }
        check_finite(path, line, "value", r.value)?;
        out.push(r.value);
    }
    Ok(out)
}

fn parse_type(path: &Path, line: usize, s: &str) -> Result<VehicleType> {
    VehicleType::parse(s)
        .ok_or_else(|| Error::data(path, line, format!("unknown vehicle type `{s}`")))
}

#[derive(Deserialize)]
struct FleetRow {
    #[serde(rename = "type")]
    vehicle: String,
    age: usize,
    count: f64,
}

/// `type,age,count` initial stocks for ages `0..=A`.
pub fn read_initial_fleet(path: &Path, year: i32) -> Result<FleetState> {
    let rows = read_rows::<FleetRow>(path, &["type", "age", "count"])?;
    let oldest = rows.iter().map(|(_, r)| r.age).max().unwrap_or(0);
    let mut stocks = PerType::new(vec![None; oldest + 1], vec![None; oldest + 1]);
    for (line, r) in &rows {
        let v = parse_type(path, *line, &r.vehicle)?;
        if !(r.count >= 0.0) || !r.count.is_finite() {
            return Err(Error::data(
                path,
                *line,
                format!("invalid count {}", r.count),
            ));
        }
        let slot = &mut stocks.get_mut(v)[r.age];
        if slot.replace(r.count).is_some() {
            return Err(Error::data(
                path,
                *line,
                format!("duplicate entry for {v} age {}", r.age),
            ));
        }
    }
    let complete = |v: VehicleType, s: &[Option<f64>]| -> Result<Vec<f64>> {
        s.iter()
            .enumerate()
            .map(|(a, x)| {
                x.ok_or_else(|| Error::data(path, 0, format!("missing {v} stock at age {a}")))
            })
            .collect()
    };
    FleetState::new(
        year,
        complete(VehicleType::Thermal, &stocks.thermal)?,
        complete(VehicleType::Electric, &stocks.electric)?,
    )
}

#[derive(Deserialize)]
struct StockRow {
    year: i32,
    #[serde(rename = "type")]
    vehicle: String,
    ownership: String,
    age: usize,
    count: f64,
}

/// `year,type,ownership,age,count` historical stock snapshots.
pub fn read_stock_history(path: &Path) -> Result<Vec<HistoricalStockRecord>> {
    let rows = read_rows::<StockRow>(path, &["year", "type", "ownership", "age", "count"])?;
    rows.into_iter()
        .map(|(line, r)| {
            let ownership = Ownership::parse(&r.ownership).ok_or_else(|| {
                Error::data(path, line, format!("unknown ownership `{}`", r.ownership))
            })?;
            if !(r.count >= 0.0) {
                return Err(Error::data(
                    path,
                    line,
                    format!("invalid count {}", r.count),
                ));
            }
            Ok(HistoricalStockRecord {
                year: r.year,
                vehicle: parse_type(path, line, &r.vehicle)?,
                ownership,
                age: r.age,
                count: r.count,
            })
        })
        .collect()
}

/// `year,value` thermal-fleet emissions in Mt.
pub fn read_emissions_history(path: &Path) -> Result<Vec<HistoricalEmissionsRecord>> {
    let s = read_year_series(path, "emissions")?;
    Ok(s.iter()
        .map(|(year, emissions_mt)| HistoricalEmissionsRecord { year, emissions_mt })
        .collect())
}

/// `year,value` EV share of new sales.
pub fn read_ev_sales(path: &Path) -> Result<Vec<EvSalesRecord>> {
    let rows = read_rows::<YearValue>(path, &["year", "value"])?;
    rows.into_iter()
        .map(|(line, r)| {
            if !(0.0..=1.0).contains(&r.value) {
                return Err(Error::data(
                    path,
                    line,
                    format!("share {} outside [0, 1]", r.value),
                ));
            }
            Ok(EvSalesRecord {
                year: r.year,
                share: r.value,
            })
        })
        .collect()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_toml<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| {
            text[..s.start.min(text.len())].lines().count().max(1)
        });
        Error::data(path, line, e.message().to_string())
    })
}

fn check_schema(path: &Path, version: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(Error::data(
            path,
            1,
            format!("unsupported schema_version {version} (expected {SCHEMA_VERSION})"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BassSection {
    pub innovation: f64,
    pub imitation: f64,
    /// First year of the adoption curve (cumulative adoption zero).
    pub start_year: i32,
}

/// Scalar model parameters (`params.toml`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub schema_version: u32,
    pub age_classes: usize,
    pub logit: LogitWeights,
    pub bass: BassSection,
}

impl ParamsFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let p: Self = parse_toml(path, &text)?;
        check_schema(path, p.schema_version)?;
        Ok(p)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("parameter file serialises")
    }

    pub fn bass(&self) -> BassParams {
        BassParams {
            innovation: self.bass.innovation,
            imitation: self.bass.imitation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub first_year: i32,
    pub last_year: i32,
}

impl Default for Horizon {
    fn default() -> Self {
        Self {
            first_year: 2022,
            last_year: 2050,
        }
    }
}

/// Input file locations. Relative paths are resolved against the
/// directory holding the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    pub params: PathBuf,
    /// Demand in million vehicle-km per year.
    pub demand: PathBuf,
    pub mileage: PathBuf,
    pub purchase_cost: PathBuf,
    pub operating_cost: PathBuf,
    pub infrastructure: PathBuf,
    /// Adoption coefficients; computed from the Bass parameters if absent.
    pub adoption: Option<PathBuf>,
    pub survival: PathBuf,
    pub emission_factor_new: PathBuf,
    pub initial_fleet: PathBuf,
    pub stock_history: Option<PathBuf>,
    pub emissions_history: Option<PathBuf>,
    pub ev_sales_share: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tol_emissions_gt: f64,
    pub tol_grad: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub initial_incentive: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverOptions::default().into()
    }
}

impl From<SolverOptions> for SolverSection {
    fn from(o: SolverOptions) -> Self {
        Self {
            tol_emissions_gt: o.tol_emissions_gt,
            tol_grad: o.tol_grad,
            max_outer: o.max_outer,
            max_inner: o.max_inner,
            initial_incentive: o.initial_incentive,
        }
    }
}

impl From<SolverSection> for SolverOptions {
    fn from(s: SolverSection) -> Self {
        Self {
            tol_emissions_gt: s.tol_emissions_gt,
            tol_grad: s.tol_grad,
            max_outer: s.max_outer,
            max_inner: s.max_inner,
            initial_incentive: s.initial_incentive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    /// Constant incentive of the IC reference, euro.
    pub ic_amount: f64,
    /// Emission caps for the Pareto sweep, Gt.
    pub pareto_targets: Vec<f64>,
    /// Concurrent solves in a sweep; 0 uses every core.
    pub workers: usize,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            ic_amount: 5_000.0,
            pareto_targets: vec![0.98, 0.96, 0.91, 0.87, 0.82, 0.73],
            workers: 0,
        }
    }
}

/// Run configuration (`config.toml`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub horizon: Horizon,
    pub data: DataPaths,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub scenarios: ScenarioSection,
    /// Directory the relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut cfg: Self = parse_toml(path, &text)?;
        check_schema(path, cfg.schema_version)?;
        if cfg.horizon.first_year >= cfg.horizon.last_year {
            return Err(Error::data(
                path,
                0,
                format!(
                    "horizon {}..{} is empty",
                    cfg.horizon.first_year, cfg.horizon.last_year
                ),
            ));
        }
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }
}

/// Everything a scenario run needs, loaded and validated.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub initial: FleetState,
    pub exo: ExogenousSeries,
    pub params: ModelParams,
    pub first_year: i32,
    pub last_year: i32,
}

pub fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    let d = &cfg.data;
    let r = |p: &PathBuf| cfg.resolve(p);
    let Horizon {
        first_year,
        last_year,
    } = cfg.horizon;

    let params_path = r(&d.params);
    let file = ParamsFile::read(&params_path)?;
    let survival = read_age_series(&r(&d.survival))?;
    if survival.len() != file.age_classes {
        return Err(Error::data(
            r(&d.survival),
            0,
            format!(
                "{} survival rates but {} age classes in {}",
                survival.len(),
                file.age_classes,
                params_path.display()
            ),
        ));
    }
    let params = ModelParams {
        survival,
        emission_factor_new: EmissionFactorTable::new(read_year_series(
            &r(&d.emission_factor_new),
            "emission_factor_new",
        )?),
        logit: file.logit,
        bass: file.bass(),
    };
    params.validate()?;

    let adoption = match &d.adoption {
        Some(p) => read_year_series(&r(p), "adoption")?,
        None => bass_adoption(&params.bass, file.bass.start_year, last_year),
    };
    let exo = ExogenousSeries {
        demand_vkm: read_year_series(&r(&d.demand), "demand")?.map(|_, v| units::mvkm_to_vkm(v)),
        mileage_km: read_year_series(&r(&d.mileage), "mileage")?,
        purchase_cost: read_cost_table(&r(&d.purchase_cost), "purchase_cost")?,
        operating_cost: read_cost_table(&r(&d.operating_cost), "operating_cost")?,
        infrastructure: read_year_series(&r(&d.infrastructure), "infrastructure")?,
        adoption,
    };
    exo.validate(first_year, last_year)?;

    let initial = read_initial_fleet(&r(&d.initial_fleet), first_year)?;
    if initial.age_classes() != params.age_classes() {
        return Err(Error::data(
            r(&d.initial_fleet),
            0,
            format!(
                "fleet covers ages 0..={} but {} age classes are configured",
                initial.age_classes(),
                params.age_classes()
            ),
        ));
    }
    Ok(Inputs {
        initial,
        exo,
        params,
        first_year,
        last_year,
    })
}
