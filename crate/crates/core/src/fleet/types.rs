use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::YearSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VehicleType {
    Thermal,
    Electric,
}

impl VehicleType {
    pub const ALL: [VehicleType; 2] = [VehicleType::Thermal, VehicleType::Electric];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            VehicleType::Thermal => 0,
            VehicleType::Electric => 1,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "thermal" | "icev" | "1" => Some(VehicleType::Thermal),
            "electric" | "ev" | "2" => Some(VehicleType::Electric),
            _ => None,
        }
    }
}

impl fmt::Display for VehicleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VehicleType::Thermal => "thermal",
            VehicleType::Electric => "electric",
        })
    }
}

/// Per-type pair of values, indexed by [`VehicleType`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerType<T> {
    pub thermal: T,
    pub electric: T,
}

impl<T> PerType<T> {
    pub fn new(thermal: T, electric: T) -> Self {
        Self { thermal, electric }
    }

    pub fn get(&self, v: VehicleType) -> &T {
        match v {
            VehicleType::Thermal => &self.thermal,
            VehicleType::Electric => &self.electric,
        }
    }

    pub fn get_mut(&mut self, v: VehicleType) -> &mut T {
        match v {
            VehicleType::Thermal => &mut self.thermal,
            VehicleType::Electric => &mut self.electric,
        }
    }
}

/// Vehicle stock by type and age class in a given year, with the CO2
/// emitted since the start of the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetState {
    pub year: i32,
    /// `stocks.get(v)[a]` is the number of vehicles of type `v` and age `a`,
    /// for `a = 0..=A`. The last class absorbs every older vehicle.
    pub stocks: PerType<Vec<f64>>,
    /// Cumulative emissions in Gt.
    pub cum_emissions_gt: f64,
}

impl FleetState {
    pub fn new(year: i32, thermal: Vec<f64>, electric: Vec<f64>) -> Result<Self> {
        if thermal.len() != electric.len() || thermal.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "stock vectors must have equal length >= 2 (got {} and {})",
                thermal.len(),
                electric.len()
            )));
        }
        if let Some(x) = thermal.iter().chain(&electric).find(|x| !(**x >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "negative or NaN stock entry {x}"
            )));
        }
        Ok(Self {
            year,
            stocks: PerType::new(thermal, electric),
            cum_emissions_gt: 0.0,
        })
    }

    pub fn empty(year: i32, age_classes: usize) -> Self {
        Self {
            year,
            stocks: PerType::new(vec![0.0; age_classes + 1], vec![0.0; age_classes + 1]),
            cum_emissions_gt: 0.0,
        }
    }

    /// Highest age index `A`.
    pub fn age_classes(&self) -> usize {
        self.stocks.thermal.len() - 1
    }

    pub fn stock(&self, v: VehicleType, age: usize) -> f64 {
        self.stocks.get(v)[age]
    }

    pub fn total_of(&self, v: VehicleType) -> f64 {
        self.stocks.get(v).iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.total_of(VehicleType::Thermal) + self.total_of(VehicleType::Electric)
    }
}

/// Time-indexed exogenous inputs. Demand is held in vehicle-km.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousSeries {
    pub demand_vkm: YearSeries,
    pub mileage_km: YearSeries,
    pub purchase_cost: PerType<YearSeries>,
    pub operating_cost: PerType<YearSeries>,
    /// Refuelling infrastructure development rate for EVs; thermal is 1.
    pub infrastructure: YearSeries,
    /// Adoption coefficient for EVs; thermal is 0.
    pub adoption: YearSeries,
}

impl ExogenousSeries {
    /// Checks that every series covers `first..=last` and respects its domain.
    pub fn validate(&self, first: i32, last: i32) -> Result<()> {
        let all = [
            &self.demand_vkm,
            &self.mileage_km,
            &self.purchase_cost.thermal,
            &self.purchase_cost.electric,
            &self.operating_cost.thermal,
            &self.operating_cost.electric,
            &self.infrastructure,
            &self.adoption,
        ];
        for s in all {
            if !s.covers(first, last) {
                return Err(Error::InvalidInput(format!(
                    "series `{}` covers {}..={} but {first}..={last} is required",
                    s.name(),
                    s.first_year(),
                    s.last_year()
                )));
            }
        }
        for year in first..=last {
            let positive = [
                &self.demand_vkm,
                &self.mileage_km,
                &self.purchase_cost.thermal,
                &self.purchase_cost.electric,
                &self.operating_cost.thermal,
                &self.operating_cost.electric,
            ];
            for s in positive {
                let x = s.get(year)?;
                if !(x > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "`{}` must be positive, got {x} in {year}",
                        s.name()
                    )));
                }
            }
            let ci = self.infrastructure.get(year)?;
            if !(0.0..=1.0).contains(&ci) {
                return Err(Error::InvalidInput(format!(
                    "infrastructure rate {ci} in {year} is outside [0, 1]"
                )));
            }
            let ca = self.adoption.get(year)?;
            if !(ca >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "adoption coefficient {ca} in {year} is negative"
                )));
            }
        }
        Ok(())
    }

    /// Unweighted mean of the two purchase costs (no incentive applied).
    pub fn mean_purchase_cost(&self, year: i32) -> Result<f64> {
        Ok(
            0.5 * (self.purchase_cost.thermal.get(year)?
                + self.purchase_cost.electric.get(year)?),
        )
    }

    pub fn mean_operating_cost(&self, year: i32) -> Result<f64> {
        Ok(0.5
            * (self.operating_cost.thermal.get(year)? + self.operating_cost.electric.get(year)?))
    }

    pub fn infrastructure_rate(&self, v: VehicleType, year: i32) -> Result<f64> {
        match v {
            VehicleType::Thermal => Ok(1.0),
            VehicleType::Electric => self.infrastructure.get(year),
        }
    }

    pub fn adoption_rate(&self, v: VehicleType, year: i32) -> Result<f64> {
        match v {
            VehicleType::Thermal => Ok(0.0),
            VehicleType::Electric => self.adoption.get(year),
        }
    }

    /// Stock implied by demand: G(t)/M(t).
    pub fn demand_stock(&self, year: i32) -> Result<f64> {
        Ok(self.demand_vkm.get(year)? / self.mileage_km.get(year)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogitWeights {
    /// Weight on normalized purchase cost.
    pub purchase: f64,
    /// Weight on normalized operating cost.
    pub operating: f64,
    /// Weight on the infrastructure gap.
    pub infrastructure: f64,
    /// Logit scale.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BassParams {
    pub innovation: f64,
    pub imitation: f64,
}

/// Emission factor of new thermal vehicles by model year, in g/km.
/// Model years before the table use its first entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionFactorTable {
    pub by_model_year: YearSeries,
}

impl EmissionFactorTable {
    pub fn new(by_model_year: YearSeries) -> Self {
        Self { by_model_year }
    }

    pub fn constant(first: i32, last: i32, value: f64) -> Self {
        Self::new(YearSeries::constant(
            "emission_factor_new",
            first,
            last,
            value,
        ))
    }

    pub fn at(&self, model_year: i32) -> Result<f64> {
        let s = &self.by_model_year;
        if model_year < s.first_year() {
            return s.get(s.first_year());
        }
        s.get(model_year)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Survival rates `η_a` for `a = 1..=A`; `survival[a - 1]` is `η_a`.
    pub survival: Vec<f64>,
    pub emission_factor_new: EmissionFactorTable,
    pub logit: LogitWeights,
    pub bass: BassParams,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.survival.is_empty() {
            return Err(Error::InvalidInput(
                "at least one survival rate is required".into(),
            ));
        }
        if let Some(eta) = self.survival.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(Error::InvalidInput(format!(
                "survival rate {eta} outside (0, 1]"
            )));
        }
        if !(self.logit.scale > 0.0) {
            return Err(Error::InvalidInput("logit scale must be positive".into()));
        }
        if self
            .emission_factor_new
            .by_model_year
            .values()
            .iter()
            .any(|e| !(*e >= 0.0))
        {
            return Err(Error::InvalidInput(
                "emission factors must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Number of age classes beyond the new-vehicle class (`A`).
    pub fn age_classes(&self) -> usize {
        self.survival.len()
    }

    /// `η_a` for `a = 1..=A`.
    #[inline]
    pub fn survival_at(&self, age: usize) -> f64 {
        self.survival[age - 1]
    }

    /// `ε_{va}(t)` in g/km: thermal cohorts carry the factor of their model
    /// year `t - a`; EVs have none.
    pub fn emission_factor(&self, v: VehicleType, age: usize, year: i32) -> Result<f64> {
        match v {
            VehicleType::Thermal => self.emission_factor_new.at(year - age as i32),
            VehicleType::Electric => Ok(0.0),
        }
    }
}

/// EV purchase incentive `u(t)` in euro, for consecutive years starting at
/// `first_year` (normally `t0 + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTrajectory {
    first_year: i32,
    incentives: Vec<f64>,
}

impl PolicyTrajectory {
    pub fn new(first_year: i32, incentives: Vec<f64>) -> Self {
        Self {
            first_year,
            incentives,
        }
    }

    pub fn constant(first: i32, last: i32, amount: f64) -> Self {
        Self::new(first, vec![amount; (last - first + 1).max(0) as usize])
    }

    pub fn from_fn(first: i32, last: i32, f: impl FnMut(i32) -> f64) -> Self {
        Self::new(first, (first..=last).map(f).collect())
    }

    /// Incentive equal to the full EV purchase price each year.
    pub fn full_price(first: i32, last: i32, exo: &ExogenousSeries) -> Result<Self> {
        let values = (first..=last)
            .map(|t| exo.purchase_cost.electric.get(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(first, values))
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.incentives.len() as i32 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.incentives
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.incentives
    }

    pub fn get(&self, year: i32) -> Result<f64> {
        if year < self.first_year || year > self.last_year() {
            return Err(Error::YearOutOfRange {
                series: "policy".into(),
                year,
                first: self.first_year,
                last: self.last_year(),
            });
        }
        Ok(self.incentives[(year - self.first_year) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.incentives
            .iter()
            .enumerate()
            .map(move |(i, &u)| (self.first_year + i as i32, u))
    }

    /// Checks `0 <= u(t) <= C_2^P(t)` for every year.
    pub fn check_bounds(&self, exo: &ExogenousSeries) -> Result<()> {
        for (t, u) in self.iter() {
            let cap = exo.purchase_cost.electric.get(t)?;
            if !(0.0..=cap).contains(&u) {
                return Err(Error::InvalidInput(format!(
                    "incentive {u} in {t} is outside [0, {cap}]"
                )));
            }
        }
        Ok(())
    }

    /// Clamps every entry onto `[0, C_2^P(t)]`.
    pub fn project(&mut self, exo: &ExogenousSeries) -> Result<()> {
        let first = self.first_year;
        for (i, u) in self.incentives.iter_mut().enumerate() {
            let cap = exo.purchase_cost.electric.get(first + i as i32)?;
            *u = u.clamp(0.0, cap);
        }
        Ok(())
    }
}

/// One simulated year.
#[derive(Debug, Clone, PartialEq)]
pub struct YearRecord {
    pub year: i32,
    pub incentive_eur: f64,
    /// New vehicles sold by type.
    pub sales: PerType<f64>,
    /// Thermal share of new sales, `P_1`.
    pub thermal_share: f64,
    pub stock: PerType<f64>,
    pub emissions_mt: f64,
    pub cumulative_gt: f64,
    /// Incentive spending from the start of the horizon to this year, G€.
    pub budget_geur: f64,
    /// Set when computed sales were negative and clamped to zero.
    pub sales_clamped: bool,
}

/// Trajectories produced by a forward simulation. Entry 0 of `states` and
/// `records` is the initial year `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub states: Vec<FleetState>,
    pub records: Vec<YearRecord>,
}

impl ScenarioResult {
    pub fn start_year(&self) -> i32 {
        self.records[0].year
    }

    pub fn end_year(&self) -> i32 {
        self.records[self.records.len() - 1].year
    }

    pub fn terminal_emissions_gt(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cumulative_gt)
    }

    pub fn total_budget_geur(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.budget_geur)
    }

    /// Total incentive spending in euro, `I(T) = Σ u(t) N_2(t)`.
    pub fn total_budget_eur(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.incentive_eur * r.sales.electric)
            .sum()
    }

    pub fn record(&self, year: i32) -> Option<&YearRecord> {
        let i = year.checked_sub(self.start_year())?;
        self.records.get(usize::try_from(i).ok()?)
    }

    pub fn state(&self, year: i32) -> Option<&FleetState> {
        let i = year.checked_sub(self.start_year())?;
        self.states.get(usize::try_from(i).ok()?)
    }

    pub fn clamped_years(&self) -> Vec<i32> {
        self.records
            .iter()
            .filter(|r| r.sales_clamped)
            .map(|r| r.year)
            .collect()
    }

    /// Euro value of the terminal emissions, for Lagrangian bookkeeping.
    pub fn lagrangian(&self, multiplier_eur_per_gt: f64) -> f64 {
        self.total_budget_eur() + multiplier_eur_per_gt * self.terminal_emissions_gt()
    }
}
