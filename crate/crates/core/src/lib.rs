//! Fleet simulation and EV-incentive backcasting.
//!
//! The [`fleet`] module simulates an age-structured passenger-car fleet and
//! its tailpipe CO2. [`reduced`] solves the two-class model semi-analytically
//! and [`ocp`] solves the full model with adjoint gradients.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod fleet;
pub mod io;
pub mod ocp;
pub mod reduced;
pub mod scenario;
pub mod series;
pub mod units;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use fleet::{
    BassParams, EmissionFactorTable, ExogenousSeries, FleetState, LogitWeights, ModelParams,
    PerType, PolicyTrajectory, ScenarioResult, VehicleType, YearRecord,
};
pub use io::{load_inputs, Inputs, RunConfig};
pub use ocp::{OcpProblem, SolveReport, SolverOptions};
pub use reduced::ReducedParams;
pub use scenario::{ScenarioSpec, Summary};
pub use series::YearSeries;
