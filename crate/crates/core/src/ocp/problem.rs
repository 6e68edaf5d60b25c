use crate::error::{Error, Result};
use crate::fleet::{
    self, ExogenousSeries, FleetState, LogitFactors, ModelParams, PolicyTrajectory, ScenarioResult,
};

/// Minimise total incentive spending subject to `ℰ(T) <= target` and
/// `0 <= u(t) <= C_2^P(t)`.
#[derive(Debug, Clone)]
pub struct OcpProblem {
    initial: FleetState,
    exo: ExogenousSeries,
    params: ModelParams,
    last_year: i32,
    target_gt: f64,
    factors: Vec<LogitFactors>,
    caps: Vec<f64>,
}

impl OcpProblem {
    pub fn new(
        initial: FleetState,
        exo: ExogenousSeries,
        params: ModelParams,
        last_year: i32,
        target_gt: f64,
    ) -> Result<Self> {
        if last_year <= initial.year {
            return Err(Error::InvalidInput(format!(
                "horizon end {last_year} must be after the initial year {}",
                initial.year
            )));
        }
        params.validate()?;
        exo.validate(initial.year, last_year)?;
        if initial.age_classes() != params.age_classes() {
            return Err(Error::InvalidInput(format!(
                "initial fleet has {} age classes, parameters have {}",
                initial.age_classes(),
                params.age_classes()
            )));
        }
        if !target_gt.is_finite() {
            return Err(Error::InvalidInput(format!(
                "emissions target {target_gt} is not finite"
            )));
        }
        let years = initial.year + 1..=last_year;
        let factors = years
            .clone()
            .map(|t| LogitFactors::at(t, &exo, &params))
            .collect::<Result<Vec<_>>>()?;
        let caps = years
            .map(|t| exo.purchase_cost.electric.get(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            initial,
            exo,
            params,
            last_year,
            target_gt,
            factors,
            caps,
        })
    }

    pub fn with_target(&self, target_gt: f64) -> Self {
        Self {
            target_gt,
            ..self.clone()
        }
    }

    pub fn initial(&self) -> &FleetState {
        &self.initial
    }

    pub fn exo(&self) -> &ExogenousSeries {
        &self.exo
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn last_year(&self) -> i32 {
        self.last_year
    }

    /// Emissions cap `Ē` in Gt.
    pub fn target_gt(&self) -> f64 {
        self.target_gt
    }

    pub fn first_year(&self) -> i32 {
        self.initial.year
    }

    /// Number of controlled years, `T - t0`.
    pub fn horizon(&self) -> usize {
        (self.last_year - self.initial.year) as usize
    }

    /// Logit factors for `t0 + 1 + i`.
    pub fn factors(&self, i: usize) -> &LogitFactors {
        &self.factors[i]
    }

    /// Incentive upper bounds `C_2^P(t)` for `t0 + 1..=T`.
    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    pub fn constant_policy(&self, amount: f64) -> PolicyTrajectory {
        PolicyTrajectory::constant(self.initial.year + 1, self.last_year, amount)
    }

    pub fn full_price_policy(&self) -> PolicyTrajectory {
        PolicyTrajectory::new(self.initial.year + 1, self.caps.clone())
    }

    pub fn simulate(&self, policy: &PolicyTrajectory) -> Result<ScenarioResult> {
        fleet::simulate(&self.initial, policy, &self.exo, &self.params)
    }

    /// `I(T) + ν ℰ(T)` in euro, with `ν` in €/Gt.
    pub fn lagrangian(&self, policy: &PolicyTrajectory, nu: f64) -> Result<f64> {
        Ok(self.simulate(policy)?.lagrangian(nu))
    }
}
