//! Full-order Hamiltonian, backward adjoint sweep and control gradient.

use crate::error::{Error, Result};
use crate::fleet::{self, FleetState, PerType, PolicyTrajectory, ScenarioResult, VehicleType};
use crate::units;

use super::problem::OcpProblem;

/// Costates `λ_va(t)` for `t = t0..=T` and the constant multiplier `ν`
/// (€/Gt) of the cumulative emissions.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointField {
    pub first_year: i32,
    pub nu: f64,
    pub lambda: Vec<PerType<Vec<f64>>>,
}

impl AdjointField {
    pub fn at(&self, year: i32) -> &PerType<Vec<f64>> {
        &self.lambda[(year - self.first_year) as usize]
    }

    pub fn zeros(first_year: i32, last_year: i32, age_classes: usize, nu: f64) -> Self {
        let n = (last_year - first_year + 1) as usize;
        Self {
            first_year,
            nu,
            lambda: vec![PerType::new(vec![0.0; age_classes + 1], vec![0.0; age_classes + 1]); n],
        }
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.lambda.len() as i32 - 1
    }
}

fn check_trajectory(
    problem: &OcpProblem,
    policy: &PolicyTrajectory,
    traj: &ScenarioResult,
) -> Result<()> {
    if traj.start_year() != problem.first_year()
        || traj.end_year() != problem.last_year()
        || policy.first_year() != problem.first_year() + 1
        || policy.last_year() != problem.last_year()
    {
        return Err(Error::InvalidInput(
            "policy and trajectory must cover the problem horizon".into(),
        ));
    }
    Ok(())
}

/// Backward sweep `λ_va(t-1) = ∂H(t)/∂S_va(t-1)` from `λ(T) = 0`.
pub fn adjoint_sweep(
    problem: &OcpProblem,
    policy: &PolicyTrajectory,
    traj: &ScenarioResult,
    nu: f64,
) -> Result<AdjointField> {
    check_trajectory(problem, policy, traj)?;
    let params = &problem.params();
    let a_max = params.age_classes();
    let t0 = problem.first_year();
    let mut field = AdjointField::zeros(t0, problem.last_year(), a_max, nu);
    let nu_g = nu / units::GRAMS_PER_GT;
    for t in (t0 + 1..=problem.last_year()).rev() {
        let i = (t - t0) as usize;
        let rec = &traj.records[i];
        let u = policy.get(t)?;
        let p1 = rec.thermal_share;
        let mileage = problem.exo().mileage_km.get(t)?;
        let eps_new = params.emission_factor(VehicleType::Thermal, 0, t)?;
        let (next, rest) = field.lambda[..=i].split_last_mut().unwrap();
        let prev = rest.last_mut().unwrap();
        // Marginal value of one extra sale; zero when sales were clamped.
        let sales_value = if rec.sales_clamped {
            0.0
        } else {
            u * (1.0 - p1)
                + next.thermal[0] * p1
                + next.electric[0] * (1.0 - p1)
                + nu_g * mileage * eps_new * p1
        };
        for v in VehicleType::ALL {
            let lam_next = next.get(v);
            let out = prev.get_mut(v);
            for (a, slot) in out.iter_mut().enumerate() {
                let target = (a + 1).min(a_max);
                let eta = params.survival_at(target);
                let emission = match v {
                    VehicleType::Thermal => {
                        nu_g * mileage * params.emission_factor(v, target, t)?
                    }
                    VehicleType::Electric => 0.0,
                };
                *slot = eta * (-sales_value + lam_next[target] + emission);
            }
        }
    }
    Ok(field)
}

/// `∂H(t)/∂u(t)` for `t = t0 + 1..=T`; this is the gradient of
/// `I(T) + ν ℰ(T)` with respect to the incentive.
pub fn gradient_u(
    problem: &OcpProblem,
    policy: &PolicyTrajectory,
    traj: &ScenarioResult,
    adjoint: &AdjointField,
) -> Result<Vec<f64>> {
    check_trajectory(problem, policy, traj)?;
    let nu_g = adjoint.nu / units::GRAMS_PER_GT;
    let t0 = problem.first_year();
    (t0 + 1..=problem.last_year())
        .map(|t| {
            let i = (t - t0) as usize;
            let rec = &traj.records[i];
            let u = policy.get(t)?;
            let n = rec.sales.thermal + rec.sales.electric;
            let factors = problem.factors(i - 1);
            let p1 = factors.thermal_share(u);
            let slope = factors.thermal_share_slope(u);
            let lam = adjoint.at(t);
            let mileage = problem.exo().mileage_km.get(t)?;
            let eps_new = problem
                .params()
                .emission_factor(VehicleType::Thermal, 0, t)?;
            Ok(n * ((1.0 - p1)
                + slope * (nu_g * mileage * eps_new + lam.thermal[0] - lam.electric[0] - u)))
        })
        .collect()
}

/// Stage Hamiltonian `H(t)` in euro, term by term: spending, new-sales
/// costates, ageing costates and the emissions carry.
pub fn hamiltonian(
    problem: &OcpProblem,
    year: i32,
    prev: &FleetState,
    incentive: f64,
    adjoint: &AdjointField,
) -> Result<f64> {
    let params = &problem.params();
    let exo = &problem.exo();
    let a_max = params.age_classes();
    let n = fleet::sales_total(year, prev, exo, params)?.total;
    let p1 = fleet::choice_share_thermal(year, incentive, exo, params)?;
    let share = PerType::new(p1, 1.0 - p1);
    let lam = adjoint.at(year);
    let mileage = exo.mileage_km.get(year)?;

    let mut h = incentive * (1.0 - p1) * n;
    for v in VehicleType::ALL {
        h += lam.get(v)[0] * share.get(v) * n;
        let s = prev.stocks.get(v);
        for a in 1..a_max {
            h += lam.get(v)[a] * params.survival_at(a) * s[a - 1];
        }
        h += lam.get(v)[a_max] * params.survival_at(a_max) * (s[a_max - 1] + s[a_max]);
    }

    let s1 = &prev.stocks.thermal;
    let eps = |a: usize| params.emission_factor(VehicleType::Thermal, a, year);
    let mut grams = mileage * eps(0)? * p1 * n;
    for a in 1..a_max {
        grams += mileage * eps(a)? * params.survival_at(a) * s1[a - 1];
    }
    grams += mileage * eps(a_max)? * params.survival_at(a_max) * (s1[a_max - 1] + s1[a_max]);
    h += adjoint.nu * (prev.cum_emissions_gt + units::grams_to_gt(grams));
    Ok(h)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::testutil::{asymmetric_exo, toy_params, toy_state};

    pub(crate) fn toy_problem(age_classes: usize, years: i32) -> OcpProblem {
        let exo = asymmetric_exo(2020, 2020 + years);
        OcpProblem::new(
            toy_state(2020, age_classes),
            exo,
            toy_params(age_classes),
            2020 + years,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn terminal_costate_is_zero() {
        let p = toy_problem(3, 4);
        let pol = p.constant_policy(2_000.0);
        let traj = p.simulate(&pol).unwrap();
        let adj = adjoint_sweep(&p, &pol, &traj, 3e12).unwrap();
        let last = adj.at(p.last_year());
        assert!(last.thermal.iter().chain(&last.electric).all(|&x| x == 0.0));
    }

    #[test]
    fn zero_costates_and_incentive_give_zero_hamiltonian() {
        let p = toy_problem(3, 4);
        let adj = AdjointField::zeros(2020, 2024, 3, 0.0);
        let h = hamiltonian(&p, 2021, p.initial(), 0.0, &adj).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn unit_multiplier_hamiltonian_is_emissions_carry() {
        let p = toy_problem(3, 4);
        let adj = AdjointField::zeros(2020, 2024, 3, 1.0);
        let mut prev = p.initial().clone();
        prev.cum_emissions_gt = 0.25;
        let h = hamiltonian(&p, 2021, &prev, 0.0, &adj).unwrap();
        let out = fleet::step(&prev, 2021, 0.0, p.exo(), p.params()).unwrap();
        let expected = 0.25 + units::mt_to_gt(out.emissions_mt);
        assert!((h - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn zero_sales_give_zero_gradient() {
        // Demand that exactly equals the survivors leaves nothing to sell.
        let params = toy_params(2);
        let mileage = 12_000.0;
        let mut prev = toy_state(2020, 2);
        let mut demand = vec![prev.total() * mileage];
        for t in 2021..=2023 {
            let aged = fleet::age_stocks(&prev, &params);
            prev = FleetState {
                year: t,
                stocks: aged,
                cum_emissions_gt: 0.0,
            };
            demand.push(prev.total() * mileage);
        }
        let mut exo = asymmetric_exo(2020, 2023);
        exo.demand_vkm = crate::series::YearSeries::new("demand", 2020, demand);
        let p = OcpProblem::new(toy_state(2020, 2), exo, params, 2023, 0.0).unwrap();
        let pol = p.constant_policy(3_000.0);
        let traj = p.simulate(&pol).unwrap();
        let adj = adjoint_sweep(&p, &pol, &traj, 1e12).unwrap();
        let grad = gradient_u(&p, &pol, &traj, &adj).unwrap();
        assert!(grad.iter().all(|g| g.abs() < 1e-6), "{grad:?}");
    }
}
