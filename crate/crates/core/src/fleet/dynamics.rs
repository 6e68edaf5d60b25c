//! Forward simulation of the age-structured fleet.

use log::warn;

use super::choice::LogitFactors;
use super::types::{
    ExogenousSeries, FleetState, ModelParams, PerType, PolicyTrajectory, ScenarioResult,
    VehicleType, YearRecord,
};
use crate::error::{Error, Result};
use crate::units;

/// Relative shortfall below which negative sales are treated as rounding.
const NEGATIVE_SALES_TOLERANCE: f64 = 1e-9;

/// How new sales are split between the two types in a given year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SalesRule {
    /// Logit split under an EV incentive (euro).
    Incentive(f64),
    /// No thermal sales at all.
    ThermalBan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SalesOutcome {
    /// Sales after clamping at zero.
    pub total: f64,
    /// Sales before clamping.
    pub raw: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: FleetState,
    pub sales: PerType<f64>,
    pub thermal_share: f64,
    pub emissions_mt: f64,
    pub sales_clamped: bool,
}

/// Ages every cohort by one year, leaving the new-vehicle class empty.
pub fn age_stocks(prev: &FleetState, params: &ModelParams) -> PerType<Vec<f64>> {
    let a_max = prev.age_classes();
    let age_one = |s: &[f64]| {
        let mut out = vec![0.0; a_max + 1];
        for a in 1..a_max {
            out[a] = params.survival_at(a) * s[a - 1];
        }
        out[a_max] = params.survival_at(a_max) * (s[a_max - 1] + s[a_max]);
        out
    };
    PerType::new(
        age_one(&prev.stocks.thermal),
        age_one(&prev.stocks.electric),
    )
}

fn check_dims(prev: &FleetState, params: &ModelParams) -> Result<()> {
    if prev.age_classes() != params.age_classes() {
        return Err(Error::InvalidInput(format!(
            "fleet has {} age classes but {} survival rates were given",
            prev.age_classes(),
            params.age_classes()
        )));
    }
    Ok(())
}

/// Total new sales `N(t)`: the demand-implied stock minus everything that
/// survives from `t - 1`.
pub fn sales_total(
    year: i32,
    prev: &FleetState,
    exo: &ExogenousSeries,
    params: &ModelParams,
) -> Result<SalesOutcome> {
    check_dims(prev, params)?;
    if prev.year != year - 1 {
        return Err(Error::InvalidInput(format!(
            "state for {} cannot be stepped to {year}",
            prev.year
        )));
    }
    let aged = age_stocks(prev, params);
    let surviving: f64 = aged.thermal.iter().chain(&aged.electric).sum();
    Ok(clamp_sales(year, exo.demand_stock(year)?, surviving))
}

fn clamp_sales(year: i32, demand_stock: f64, surviving: f64) -> SalesOutcome {
    let raw = demand_stock - surviving;
    if raw >= 0.0 {
        return SalesOutcome {
            total: raw,
            raw,
            clamped: false,
        };
    }
    if -raw > NEGATIVE_SALES_TOLERANCE * demand_stock {
        warn!(
            "{year}: surviving stock exceeds demand by {:.0} vehicles; sales clamped to zero",
            -raw
        );
    }
    SalesOutcome {
        total: 0.0,
        raw,
        clamped: true,
    }
}

/// Advances the fleet from `prev` (year `t - 1`) to year `t` under an EV
/// incentive `u`.
pub fn step(
    prev: &FleetState,
    year: i32,
    incentive: f64,
    exo: &ExogenousSeries,
    params: &ModelParams,
) -> Result<StepOutcome> {
    step_with(prev, year, SalesRule::Incentive(incentive), exo, params)
}

pub fn step_with(
    prev: &FleetState,
    year: i32,
    rule: SalesRule,
    exo: &ExogenousSeries,
    params: &ModelParams,
) -> Result<StepOutcome> {
    let sales = sales_total(year, prev, exo, params)?;
    let thermal_share = match rule {
        SalesRule::Incentive(u) => {
            if !(u >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "negative incentive {u} in {year}"
                )));
            }
            LogitFactors::at(year, exo, params)?.thermal_share(u)
        }
        SalesRule::ThermalBan => 0.0,
    };
    let mut stocks = age_stocks(prev, params);
    let new_thermal = thermal_share * sales.total;
    let new_electric = (1.0 - thermal_share) * sales.total;
    stocks.thermal[0] = new_thermal;
    stocks.electric[0] = new_electric;
    let mut state = FleetState {
        year,
        stocks,
        cum_emissions_gt: prev.cum_emissions_gt,
    };
    let emissions_mt = yearly_emissions(&state, exo, params)?;
    state.cum_emissions_gt += units::mt_to_gt(emissions_mt);
    Ok(StepOutcome {
        state,
        sales: PerType::new(new_thermal, new_electric),
        thermal_share,
        emissions_mt,
        sales_clamped: sales.clamped,
    })
}

/// Tailpipe emissions `E(t) = Σ_a ε_{1a}(t) M(t) S_{1a}(t)` in Mt.
pub fn yearly_emissions(
    state: &FleetState,
    exo: &ExogenousSeries,
    params: &ModelParams,
) -> Result<f64> {
    let year = state.year;
    let mileage = exo.mileage_km.get(year)?;
    let mut grams = 0.0;
    for (a, &s) in state.stocks.thermal.iter().enumerate() {
        if s != 0.0 {
            grams += params.emission_factor(VehicleType::Thermal, a, year)? * mileage * s;
        }
    }
    Ok(units::grams_to_mt(grams))
}

/// Simulates the horizon covered by `policy`, which must start the year
/// after `initial`.
pub fn simulate(
    initial: &FleetState,
    policy: &PolicyTrajectory,
    exo: &ExogenousSeries,
    params: &ModelParams,
) -> Result<ScenarioResult> {
    if policy.first_year() != initial.year + 1 {
        return Err(Error::InvalidInput(format!(
            "policy starts in {} but the initial state is for {}",
            policy.first_year(),
            initial.year
        )));
    }
    simulate_with(initial, policy.last_year(), exo, params, |t| {
        policy.get(t).map(SalesRule::Incentive)
    })
}

/// Simulates a ban on thermal sales from the first simulated year.
pub fn simulate_ban(
    initial: &FleetState,
    last_year: i32,
    exo: &ExogenousSeries,
    params: &ModelParams,
) -> Result<ScenarioResult> {
    simulate_with(initial, last_year, exo, params, |_| {
        Ok(SalesRule::ThermalBan)
    })
}

pub fn simulate_with(
    initial: &FleetState,
    last_year: i32,
    exo: &ExogenousSeries,
    params: &ModelParams,
    mut rule: impl FnMut(i32) -> Result<SalesRule>,
) -> Result<ScenarioResult> {
    check_dims(initial, params)?;
    let mut start = initial.clone();
    start.cum_emissions_gt = 0.0;
    let horizon = (last_year - initial.year).max(0) as usize;
    let mut states = Vec::with_capacity(horizon + 1);
    let mut records = Vec::with_capacity(horizon + 1);
    records.push(YearRecord {
        year: start.year,
        incentive_eur: 0.0,
        sales: PerType::new(0.0, 0.0),
        thermal_share: f64::NAN,
        stock: PerType::new(
            start.total_of(VehicleType::Thermal),
            start.total_of(VehicleType::Electric),
        ),
        emissions_mt: yearly_emissions(&start, exo, params)?,
        cumulative_gt: 0.0,
        budget_geur: 0.0,
        sales_clamped: false,
    });
    states.push(start);
    let mut budget_eur = 0.0;
    for year in initial.year + 1..=last_year {
        let r = rule(year)?;
        let out = step_with(&states[states.len() - 1], year, r, exo, params)?;
        let incentive = match r {
            SalesRule::Incentive(u) => u,
            SalesRule::ThermalBan => 0.0,
        };
        budget_eur += incentive * out.sales.electric;
        records.push(YearRecord {
            year,
            incentive_eur: incentive,
            sales: out.sales,
            thermal_share: out.thermal_share,
            stock: PerType::new(
                out.state.total_of(VehicleType::Thermal),
                out.state.total_of(VehicleType::Electric),
            ),
            emissions_mt: out.emissions_mt,
            cumulative_gt: out.state.cum_emissions_gt,
            budget_geur: units::eur_to_geur(budget_eur),
            sales_clamped: out.sales_clamped,
        });
        states.push(out.state);
    }
    Ok(ScenarioResult { states, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{symmetric_exo, toy_params, toy_state};

    #[test]
    fn unit_survival_constant_demand_only_ages() {
        let mut params = toy_params(3);
        params.survival = vec![1.0; 3];
        let mut exo = symmetric_exo(2020, 2024);
        let state = toy_state(2020, 3);
        let total = state.total();
        exo.demand_vkm =
            crate::series::YearSeries::constant("demand", 2020, 2024, total * 10_000.0);
        exo.mileage_km = crate::series::YearSeries::constant("mileage", 2020, 2024, 10_000.0);
        let out = step(&state, 2021, 0.0, &exo, &params).unwrap();
        assert!(out.sales.thermal.abs() < 1e-6 && out.sales.electric.abs() < 1e-6);
        assert_eq!(out.state.stocks.thermal[1], state.stocks.thermal[0]);
        assert_eq!(out.state.stocks.thermal[2], state.stocks.thermal[1]);
        assert_eq!(
            out.state.stocks.thermal[3],
            state.stocks.thermal[2] + state.stocks.thermal[3]
        );
    }

    #[test]
    fn ban_sends_all_sales_to_ev() {
        let params = toy_params(3);
        let exo = symmetric_exo(2020, 2024);
        let state = toy_state(2020, 3);
        let out = step_with(&state, 2021, SalesRule::ThermalBan, &exo, &params).unwrap();
        assert_eq!(out.state.stocks.thermal[0], 0.0);
        assert!(out.sales.electric > 0.0);
    }

    #[test]
    fn all_electric_fleet_emits_nothing() {
        let params = toy_params(3);
        let exo = symmetric_exo(2020, 2024);
        let state = FleetState::new(2021, vec![0.0; 4], vec![5.0e5; 4]).unwrap();
        assert_eq!(yearly_emissions(&state, &exo, &params).unwrap(), 0.0);
    }

    #[test]
    fn single_cohort_emissions() {
        let mut params = toy_params(1);
        params.emission_factor_new =
            super::super::types::EmissionFactorTable::constant(1990, 2030, 100.0);
        let mut exo = symmetric_exo(2020, 2024);
        exo.mileage_km = crate::series::YearSeries::constant("mileage", 2020, 2024, 13_500.0);
        let state = FleetState::new(2021, vec![1.0e6, 0.0], vec![0.0, 0.0]).unwrap();
        let e = yearly_emissions(&state, &exo, &params).unwrap();
        assert!((e - 1.35).abs() < 1e-12);
    }

    #[test]
    fn shrinking_demand_clamps_sales() {
        let params = toy_params(3);
        let mut exo = symmetric_exo(2020, 2024);
        exo.demand_vkm = exo.demand_vkm.map(|_, v| v * 0.1);
        let state = toy_state(2020, 3);
        let s = sales_total(2021, &state, &exo, &params).unwrap();
        assert!(s.clamped);
        assert_eq!(s.total, 0.0);
        assert!(s.raw < 0.0);
    }

    #[test]
    fn step_requires_consecutive_year() {
        let params = toy_params(3);
        let exo = symmetric_exo(2020, 2024);
        let state = toy_state(2020, 3);
        assert!(step(&state, 2022, 0.0, &exo, &params).is_err());
    }

    #[test]
    fn mismatched_age_classes_rejected() {
        let params = toy_params(4);
        let exo = symmetric_exo(2020, 2024);
        let state = toy_state(2020, 3);
        assert!(step(&state, 2021, 0.0, &exo, &params).is_err());
    }
}
