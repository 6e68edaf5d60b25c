#![allow(dead_code)]

use std::path::PathBuf;

use fleet_backcast::fleet::{BassParams, EmissionFactorTable, LogitWeights};
use fleet_backcast::{
    load_inputs, ExogenousSeries, FleetState, Inputs, ModelParams, PerType, RunConfig, YearSeries,
};

pub fn france_config_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/france/config.toml")
}

pub fn france_config() -> RunConfig {
    RunConfig::read(&france_config_path()).expect("France configuration loads")
}

pub fn france() -> Inputs {
    load_inputs(&france_config()).expect("France fixtures load")
}

pub fn table2_weights() -> LogitWeights {
    LogitWeights {
        purchase: -0.3,
        operating: -0.15,
        infrastructure: -0.3,
        scale: 6.75,
    }
}

/// A small synthetic instance with `age_classes` classes over
/// `first..=last`, driven by a handful of shape parameters so property
/// tests can vary it.
#[derive(Debug, Clone, Copy)]
pub struct ToySpec {
    pub age_classes: usize,
    pub first: i32,
    pub last: i32,
    pub growth: f64,
    pub ev_premium: f64,
    pub infra0: f64,
    pub adoption0: f64,
    pub eta_young: f64,
    pub eta_old: f64,
    pub thermal_fraction: f64,
}

impl Default for ToySpec {
    fn default() -> Self {
        Self {
            age_classes: 4,
            first: 2020,
            last: 2030,
            growth: 0.01,
            ev_premium: 6_000.0,
            infra0: 0.3,
            adoption0: 0.03,
            eta_young: 0.98,
            eta_old: 0.8,
            thermal_fraction: 0.9,
        }
    }
}

impl ToySpec {
    pub fn exo(&self) -> ExogenousSeries {
        let (first, last) = (self.first, self.last);
        let k = |t: i32| (t - first) as f64;
        let total = 3.0e7;
        let mileage = 12_500.0;
        ExogenousSeries {
            demand_vkm: YearSeries::from_fn("demand", first, last, |t| {
                total * mileage * (1.0 + self.growth).powf(k(t))
            }),
            mileage_km: YearSeries::constant("mileage", first, last, mileage),
            purchase_cost: PerType::new(
                YearSeries::from_fn("purchase_thermal", first, last, |t| 28_000.0 + 100.0 * k(t)),
                YearSeries::from_fn("purchase_electric", first, last, |t| {
                    28_000.0 + self.ev_premium * (1.0 - 0.04 * k(t)).max(0.0)
                }),
            ),
            operating_cost: PerType::new(
                YearSeries::constant("operating_thermal", first, last, 560.0),
                YearSeries::constant("operating_electric", first, last, 620.0),
            ),
            infrastructure: YearSeries::from_fn("infrastructure", first, last, |t| {
                (self.infra0 + 0.05 * k(t)).min(1.0)
            }),
            adoption: YearSeries::from_fn("adoption", first, last, |t| {
                (self.adoption0 * (1.0 + 0.3 * k(t))).min(0.9)
            }),
        }
    }

    pub fn params(&self) -> ModelParams {
        let a_max = self.age_classes;
        ModelParams {
            survival: (1..=a_max)
                .map(|a| {
                    let x = if a_max > 1 {
                        (a - 1) as f64 / (a_max - 1) as f64
                    } else {
                        0.0
                    };
                    self.eta_young + (self.eta_old - self.eta_young) * x
                })
                .collect(),
            emission_factor_new: EmissionFactorTable::new(YearSeries::from_fn(
                "emission_factor_new",
                1980,
                self.last,
                |t| 190.0 - 2.0 * (t - 1980) as f64,
            )),
            logit: table2_weights(),
            bass: BassParams {
                innovation: 0.02,
                imitation: 0.4,
            },
        }
    }

    /// Fleet whose total equals the demand-implied stock in `first`.
    pub fn initial(&self) -> FleetState {
        let n = (self.age_classes + 1) as f64;
        let per = 3.0e7 / n;
        FleetState::new(
            self.first,
            vec![per * self.thermal_fraction; self.age_classes + 1],
            vec![per * (1.0 - self.thermal_fraction); self.age_classes + 1],
        )
        .unwrap()
    }
}
