//! Logit choice between thermal and electric new vehicles.

use super::types::{ExogenousSeries, ModelParams, VehicleType};
use crate::error::{Error, Result};

/// Utility `U_v(t)` of buying a vehicle of type `v` given an EV incentive
/// `u` (euro). The incentive only enters the electric utility.
pub fn utility(
    v: VehicleType,
    year: i32,
    incentive: f64,
    exo: &ExogenousSeries,
    params: &ModelParams,
) -> Result<f64> {
    if !(incentive >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "negative incentive {incentive}"
        )));
    }
    let w = &params.logit;
    let u = match v {
        VehicleType::Thermal => 0.0,
        VehicleType::Electric => incentive,
    };
    let adoption = exo.adoption_rate(v, year)?;
    let purchase = exo.purchase_cost.get(v).get(year)?;
    let operating = exo.operating_cost.get(v).get(year)?;
    let infra = exo.infrastructure_rate(v, year)?;
    let cost_term = w.purchase * (purchase - u) / exo.mean_purchase_cost(year)?
        + w.operating * operating / exo.mean_operating_cost(year)?
        + w.infrastructure * (1.0 - infra);
    Ok((1.0 - adoption) * cost_term)
}

/// Time-only factors of the thermal share
/// `P_1(t, u) = 𝒫 / (𝒫 + 𝒬 ℛ^u)`, stored as logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitFactors {
    /// `ln 𝒫 = μ U_1`.
    pub ln_thermal: f64,
    /// `ln 𝒬 = μ U_2(u = 0)`.
    pub ln_electric: f64,
    /// `ln ℛ`, the change in `μ U_2` per euro of incentive. Positive for
    /// negative purchase weights.
    pub ln_incentive: f64,
}

impl LogitFactors {
    pub fn at(year: i32, exo: &ExogenousSeries, params: &ModelParams) -> Result<Self> {
        let mu = params.logit.scale;
        let u1 = utility(VehicleType::Thermal, year, 0.0, exo, params)?;
        let u2 = utility(VehicleType::Electric, year, 0.0, exo, params)?;
        let adoption = exo.adoption_rate(VehicleType::Electric, year)?;
        let ln_incentive =
            -mu * (1.0 - adoption) * params.logit.purchase / exo.mean_purchase_cost(year)?;
        Ok(Self {
            ln_thermal: mu * u1,
            ln_electric: mu * u2,
            ln_incentive,
        })
    }

    /// `(𝒫, 𝒬, ℛ)`.
    pub fn weights(&self) -> (f64, f64, f64) {
        (
            self.ln_thermal.exp(),
            self.ln_electric.exp(),
            self.ln_incentive.exp(),
        )
    }

    /// `𝒬 ℛ^u / 𝒫`, the electric-to-thermal odds.
    pub fn odds(&self, incentive: f64) -> f64 {
        (self.ln_electric + incentive * self.ln_incentive - self.ln_thermal).exp()
    }

    pub fn thermal_share(&self, incentive: f64) -> f64 {
        1.0 / (1.0 + self.odds(incentive))
    }

    /// `∂P_1/∂u = -P_1 (1 - P_1) ln ℛ`.
    pub fn thermal_share_slope(&self, incentive: f64) -> f64 {
        let p = self.thermal_share(incentive);
        -p * (1.0 - p) * self.ln_incentive
    }
}

/// Thermal share of new sales `P_1(t, u)`; the electric share is `1 - P_1`.
pub fn choice_share_thermal(
    year: i32,
    incentive: f64,
    exo: &ExogenousSeries,
    params: &ModelParams,
) -> Result<f64> {
    if !(incentive >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "negative incentive {incentive}"
        )));
    }
    Ok(LogitFactors::at(year, exo, params)?.thermal_share(incentive))
}
