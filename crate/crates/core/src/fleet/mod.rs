//! Fleet turnover, vehicle choice, adoption and emissions accounting.

mod bass;
mod choice;
mod dynamics;
mod types;

pub use bass::{bass_adoption, bass_path};
pub use choice::{choice_share_thermal, utility, LogitFactors};
pub use dynamics::{
    age_stocks, sales_total, simulate, simulate_ban, simulate_with, step, step_with,
    yearly_emissions, SalesOutcome, SalesRule, StepOutcome,
};
pub use types::{
    BassParams, EmissionFactorTable, ExogenousSeries, FleetState, LogitWeights, ModelParams,
    PerType, PolicyTrajectory, ScenarioResult, VehicleType, YearRecord,
};
