//! Small hand-built instances shared by unit tests.

use crate::fleet::{
    BassParams, EmissionFactorTable, ExogenousSeries, FleetState, LogitWeights, ModelParams,
    PerType,
};
use crate::series::YearSeries;

pub fn table2_weights() -> LogitWeights {
    LogitWeights {
        purchase: -0.3,
        operating: -0.15,
        infrastructure: -0.3,
        scale: 6.75,
    }
}

/// Identical costs for both types, full infrastructure and no adoption,
/// with demand growing 1% a year.
pub fn symmetric_exo(first: i32, last: i32) -> ExogenousSeries {
    let c = |name: &str, v: f64| YearSeries::constant(name, first, last, v);
    ExogenousSeries {
        demand_vkm: YearSeries::from_fn("demand", first, last, |t| {
            4.0e11 * 1.01_f64.powi(t - first)
        }),
        mileage_km: c("mileage", 12_000.0),
        purchase_cost: PerType::new(
            c("purchase_thermal", 30_000.0),
            c("purchase_electric", 30_000.0),
        ),
        operating_cost: PerType::new(
            c("operating_thermal", 600.0),
            c("operating_electric", 600.0),
        ),
        infrastructure: c("infrastructure", 1.0),
        adoption: c("adoption", 0.0),
    }
}

/// EVs dearer than thermal cars, partial infrastructure, growing adoption.
pub fn asymmetric_exo(first: i32, last: i32) -> ExogenousSeries {
    let mut exo = symmetric_exo(first, last);
    exo.purchase_cost.electric = YearSeries::from_fn("purchase_electric", first, last, |t| {
        36_000.0 - 200.0 * (t - first) as f64
    });
    exo.operating_cost.electric = YearSeries::constant("operating_electric", first, last, 450.0);
    exo.infrastructure = YearSeries::from_fn("infrastructure", first, last, |t| {
        (0.2 + 0.05 * (t - first) as f64).min(1.0)
    });
    exo.adoption = YearSeries::from_fn("adoption", first, last, |t| {
        (0.02 + 0.01 * (t - first) as f64).min(0.5)
    });
    exo
}

pub fn toy_params(age_classes: usize) -> ModelParams {
    ModelParams {
        survival: (1..=age_classes)
            .map(|a| 0.99 - 0.2 * a as f64 / age_classes.max(1) as f64)
            .collect(),
        emission_factor_new: EmissionFactorTable::new(YearSeries::from_fn(
            "emission_factor_new",
            1990,
            2060,
            |t| 180.0 - 1.5 * (t - 1990) as f64,
        )),
        logit: table2_weights(),
        bass: BassParams {
            innovation: 0.02,
            imitation: 0.4,
        },
    }
}

/// A fleet whose total matches `symmetric_exo` demand in `year`.
pub fn toy_state(year: i32, age_classes: usize) -> FleetState {
    let total = 4.0e11 / 12_000.0;
    let n = (age_classes + 1) as f64;
    let thermal = vec![0.9 * total / n; age_classes + 1];
    let electric = vec![0.1 * total / n; age_classes + 1];
    FleetState::new(year, thermal, electric).unwrap()
}
