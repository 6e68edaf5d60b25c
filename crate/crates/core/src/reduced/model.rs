//! Two-class model with constant mileage, survival and emission factor.

use crate::error::{Error, Result};
use crate::fleet::{ExogenousSeries, LogitFactors, ModelParams, PolicyTrajectory};
use crate::units;

use super::lambert::lambert_w0_exp;

/// Inputs of the reduced-order model over `t0..=T`. Per-year vectors are
/// indexed by `t - t0 - 1`, i.e. they start at `t0 + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedParams {
    pub eta: f64,
    pub mileage_km: f64,
    /// Thermal emission factor `ε₁` in g/km.
    pub emission_factor: f64,
    pub first_year: i32,
    /// Thermal stock `S_1(t0)`.
    pub initial_thermal: f64,
    /// New sales `N(t)`.
    pub sales: Vec<f64>,
    pub factors: Vec<LogitFactors>,
    /// Upper bound on the incentive, `C_2^P(t)`.
    pub price_cap: Vec<f64>,
}

impl ReducedParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        eta: f64,
        mileage_km: f64,
        emission_factor: f64,
        first_year: i32,
        initial_thermal: f64,
        sales: Vec<f64>,
        factors: Vec<LogitFactors>,
        price_cap: Vec<f64>,
    ) -> Result<Self> {
        let rp = Self {
            eta,
            mileage_km,
            emission_factor,
            first_year,
            initial_thermal,
            sales,
            factors,
            price_cap,
        };
        rp.validate()?;
        Ok(rp)
    }

    /// Builds the reduced model from the full-order inputs, with sales
    /// `N(t) = (G(t) - η G(t-1)) / M`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fleet(
        exo: &ExogenousSeries,
        params: &ModelParams,
        first_year: i32,
        last_year: i32,
        eta: f64,
        mileage_km: f64,
        emission_factor: f64,
        initial_thermal: f64,
    ) -> Result<Self> {
        let mut sales = Vec::new();
        let mut factors = Vec::new();
        let mut price_cap = Vec::new();
        for t in first_year + 1..=last_year {
            let g = exo.demand_vkm.get(t)?;
            let g_prev = exo.demand_vkm.get(t - 1)?;
            sales.push((g - eta * g_prev) / mileage_km);
            factors.push(LogitFactors::at(t, exo, params)?);
            price_cap.push(exo.purchase_cost.electric.get(t)?);
        }
        Self::new(
            eta,
            mileage_km,
            emission_factor,
            first_year,
            initial_thermal,
            sales,
            factors,
            price_cap,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "survival rate {} outside (0, 1]",
                self.eta
            )));
        }
        if !(self.mileage_km > 0.0) || !(self.emission_factor >= 0.0) {
            return Err(Error::InvalidInput(
                "mileage must be positive and the emission factor non-negative".into(),
            ));
        }
        if !(self.initial_thermal >= 0.0) {
            return Err(Error::InvalidInput(
                "initial thermal stock must be non-negative".into(),
            ));
        }
        let n = self.sales.len();
        if n == 0 || self.factors.len() != n || self.price_cap.len() != n {
            return Err(Error::InvalidInput(format!(
                "per-year inputs must be non-empty and of equal length (sales {n}, factors {}, caps {})",
                self.factors.len(),
                self.price_cap.len()
            )));
        }
        if let Some(s) = self.sales.iter().find(|s| !(**s >= 0.0)) {
            return Err(Error::InvalidInput(format!("negative sales {s}")));
        }
        if let Some(f) = self.factors.iter().find(|f| !(f.ln_incentive > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "incentive factor ln R = {} must be positive",
                f.ln_incentive
            )));
        }
        Ok(())
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.sales.len() as i32
    }

    pub fn horizon(&self) -> usize {
        self.sales.len()
    }

    /// CO2 of one thermal vehicle over one year, `M ε₁`, in Gt.
    pub fn vehicle_emissions_gt(&self) -> f64 {
        units::vehicle_year_gt(self.mileage_km, self.emission_factor)
    }

    /// `Σ_{k=0}^{n-1} η^k`.
    fn geometric(&self, n: i32) -> f64 {
        if (1.0 - self.eta).abs() < 1e-12 {
            n as f64
        } else {
            (1.0 - self.eta.powi(n)) / (1.0 - self.eta)
        }
    }

    fn index(&self, year: i32) -> Result<usize> {
        if year <= self.first_year || year > self.last_year() {
            return Err(Error::YearOutOfRange {
                series: "reduced model".into(),
                year,
                first: self.first_year + 1,
                last: self.last_year(),
            });
        }
        Ok((year - self.first_year - 1) as usize)
    }
}

/// Costates of the reduced problem: `ν` is constant, `λ(t)` is stored for
/// `t = t0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointPair {
    pub nu: f64,
    pub first_year: i32,
    pub lambda: Vec<f64>,
}

impl AdjointPair {
    pub fn lambda_at(&self, year: i32) -> f64 {
        self.lambda[(year - self.first_year) as usize]
    }
}

/// `λ(t) = ν₀ M ε₁ η (1 - η^{T-t}) / (1 - η)`, which solves
/// `λ(t-1) = η (λ(t) + M ε₁ ν₀)` with `λ(T) = 0`. `ν₀` is in €/Gt.
pub fn adjoint_closed_form(rp: &ReducedParams, nu0: f64) -> AdjointPair {
    let k = rp.vehicle_emissions_gt();
    let big_t = rp.last_year();
    let lambda = (rp.first_year..=big_t)
        .map(|t| nu0 * k * rp.eta * rp.geometric(big_t - t))
        .collect();
    AdjointPair {
        nu: nu0,
        first_year: rp.first_year,
        lambda,
    }
}

/// Coefficients of the Lambert form `u = (a - W(-b e^a)) / c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambertCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl LambertCoefficients {
    pub fn new(rp: &ReducedParams, nu0: f64) -> Self {
        let k = rp.vehicle_emissions_gt();
        let big_t = rp.last_year();
        let mut a = Vec::with_capacity(rp.horizon());
        let mut b = Vec::with_capacity(rp.horizon());
        let mut c = Vec::with_capacity(rp.horizon());
        for (i, f) in rp.factors.iter().enumerate() {
            let t = rp.first_year + 1 + i as i32;
            // λ(t) + M ε₁ ν₀
            let marginal = nu0 * k * rp.geometric(big_t - t + 1);
            c.push(f.ln_incentive);
            a.push(f.ln_incentive * marginal - 1.0);
            b.push(-(f.ln_electric - f.ln_thermal).exp());
        }
        Self { a, b, c }
    }

    /// `W(t) = W₀(-b(t) e^{a(t)})`, evaluated in log space.
    pub fn w(&self, rp: &ReducedParams, i: usize) -> Result<f64> {
        let f = &rp.factors[i];
        lambert_w0_exp(f.ln_electric - f.ln_thermal + self.a[i])
    }
}

/// Unconstrained stationary control for each year, before projection.
pub fn unconstrained_control(rp: &ReducedParams, nu0: f64) -> Result<Vec<f64>> {
    if !(nu0 >= 0.0) || !nu0.is_finite() {
        return Err(Error::Domain(format!(
            "multiplier ν₀ = {nu0} must be finite and >= 0"
        )));
    }
    let coef = LambertCoefficients::new(rp, nu0);
    (0..rp.horizon())
        .map(|i| Ok((coef.a[i] - coef.w(rp, i)?) / coef.c[i]))
        .collect()
}

/// Optimal incentive for a given `ν₀` (€/Gt), projected onto
/// `[0, C_2^P(t)]`.
pub fn optimal_control(rp: &ReducedParams, nu0: f64) -> Result<PolicyTrajectory> {
    let raw = unconstrained_control(rp, nu0)?;
    let values = raw
        .into_iter()
        .zip(&rp.price_cap)
        .map(|(u, &cap)| u.clamp(0.0, cap))
        .collect();
    Ok(PolicyTrajectory::new(rp.first_year + 1, values))
}

/// Left minus right side of the stationarity condition
/// `𝒬ℛ^u/𝒫 + u ln ℛ = ln ℛ (λ + M ε₁ ν) - 1`.
pub fn stationarity_residual(rp: &ReducedParams, year: i32, u: f64, nu0: f64) -> Result<f64> {
    let i = rp.index(year)?;
    let f = &rp.factors[i];
    let lambda = adjoint_closed_form(rp, nu0).lambda_at(year);
    let c = f.ln_incentive;
    let lhs = f.odds(u) + c * u;
    let rhs = c * (lambda + rp.vehicle_emissions_gt() * nu0) - 1.0;
    Ok(lhs - rhs)
}

/// Stage Hamiltonian `H(t)` in euro, given `S_1(t-1)`, `ℰ(t-1)` (Gt), the
/// incentive and the costates at `t`.
pub fn hamiltonian(
    rp: &ReducedParams,
    year: i32,
    thermal_prev: f64,
    cum_prev_gt: f64,
    incentive: f64,
    lambda: f64,
    nu: f64,
) -> Result<f64> {
    let i = rp.index(year)?;
    let n = rp.sales[i];
    let p1 = rp.factors[i].thermal_share(incentive);
    let s1 = rp.eta * thermal_prev + n * p1;
    Ok(incentive * n * (1.0 - p1)
        + lambda * s1
        + nu * (cum_prev_gt + rp.vehicle_emissions_gt() * s1))
}

/// Forward trajectory of the reduced model; vectors cover `t0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTrajectory {
    pub thermal: Vec<f64>,
    pub cumulative_gt: Vec<f64>,
    /// Cumulative incentive spending, euro.
    pub budget_eur: Vec<f64>,
}

impl ReducedTrajectory {
    pub fn terminal_gt(&self) -> f64 {
        *self.cumulative_gt.last().unwrap()
    }

    pub fn total_budget_eur(&self) -> f64 {
        *self.budget_eur.last().unwrap()
    }
}

fn check_policy(rp: &ReducedParams, policy: &PolicyTrajectory) -> Result<()> {
    if policy.first_year() != rp.first_year + 1 || policy.last_year() != rp.last_year() {
        return Err(Error::InvalidInput(format!(
            "policy covers {}..={} but the model runs {}..={}",
            policy.first_year(),
            policy.last_year(),
            rp.first_year + 1,
            rp.last_year()
        )));
    }
    Ok(())
}

pub fn simulate_reduced(
    rp: &ReducedParams,
    policy: &PolicyTrajectory,
) -> Result<ReducedTrajectory> {
    check_policy(rp, policy)?;
    let k = rp.vehicle_emissions_gt();
    let mut thermal = vec![rp.initial_thermal];
    let mut cumulative_gt = vec![0.0];
    let mut budget_eur = vec![0.0];
    for (i, &u) in policy.values().iter().enumerate() {
        let n = rp.sales[i];
        let p1 = rp.factors[i].thermal_share(u);
        let s1 = rp.eta * thermal[i] + n * p1;
        thermal.push(s1);
        cumulative_gt.push(cumulative_gt[i] + k * s1);
        budget_eur.push(budget_eur[i] + u * n * (1.0 - p1));
    }
    Ok(ReducedTrajectory {
        thermal,
        cumulative_gt,
        budget_eur,
    })
}

/// `S_1(T) = η^{T-t0} S_1(t0) + Σ_t η^{T-t} N(t) P_1(t, u(t))`.
pub fn closed_form_stock(rp: &ReducedParams, policy: &PolicyTrajectory) -> Result<f64> {
    check_policy(rp, policy)?;
    let big_t = rp.last_year();
    let mut s = rp.eta.powi(big_t - rp.first_year) * rp.initial_thermal;
    for (t, u) in policy.iter() {
        let i = (t - rp.first_year - 1) as usize;
        s += rp.eta.powi(big_t - t) * rp.sales[i] * rp.factors[i].thermal_share(u);
    }
    Ok(s)
}

/// Terminal emissions (Gt) and total budget (euro) from the explicit sums,
/// without stepping the state.
pub fn explicit_terminal(rp: &ReducedParams, policy: &PolicyTrajectory) -> Result<(f64, f64)> {
    check_policy(rp, policy)?;
    let big_t = rp.last_year();
    let t0 = rp.first_year;
    let mut vehicle_years = rp.initial_thermal * rp.eta * rp.geometric(big_t - t0);
    let mut budget = 0.0;
    for (t, u) in policy.iter() {
        let i = (t - t0 - 1) as usize;
        let p1 = rp.factors[i].thermal_share(u);
        vehicle_years += rp.sales[i] * p1 * rp.geometric(big_t - t + 1);
        budget += u * rp.sales[i] * (1.0 - p1);
    }
    Ok((rp.vehicle_emissions_gt() * vehicle_years, budget))
}

/// Terminal emissions (Gt) and budget (euro) under the optimal control
/// for `ν₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalValues {
    pub emissions_gt: f64,
    pub budget_eur: f64,
}

pub fn eval_terminal(rp: &ReducedParams, nu0: f64) -> Result<TerminalValues> {
    let policy = optimal_control(rp, nu0)?;
    let traj = simulate_reduced(rp, &policy)?;
    Ok(TerminalValues {
        emissions_gt: traj.terminal_gt(),
        budget_eur: traj.total_budget_eur(),
    })
}
