//! Bisection on the terminal multiplier `ν₀`.

use crate::error::{Error, Result};
use crate::fleet::PolicyTrajectory;

use super::model::{eval_terminal, optimal_control, simulate_reduced, ReducedParams};

const MAX_BRACKET_STEPS: usize = 40;
const MAX_BISECTIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    /// Terminal multiplier in €/Gt.
    pub nu0: f64,
    pub policy: PolicyTrajectory,
    pub terminal_gt: f64,
    pub budget_eur: f64,
    pub iterations: usize,
}

/// Terminal emissions under the full-price incentive and under no
/// incentive, in Gt.
pub fn achievable_range(rp: &ReducedParams) -> Result<(f64, f64)> {
    let full = PolicyTrajectory::new(rp.first_year + 1, rp.price_cap.clone());
    let none = PolicyTrajectory::constant(rp.first_year + 1, rp.last_year(), 0.0);
    Ok((
        simulate_reduced(rp, &full)?.terminal_gt(),
        simulate_reduced(rp, &none)?.terminal_gt(),
    ))
}

/// Finds the `ν₀` whose optimal control meets `ℰ(T) = target` within
/// `tol_gt`. The returned policy always satisfies `ℰ(T) <= target + tol_gt`.
pub fn shoot_nu0(rp: &ReducedParams, target_gt: f64, tol_gt: f64) -> Result<ShootingResult> {
    rp.validate()?;
    if !(tol_gt > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol_gt} must be positive"
        )));
    }
    let (min, max) = achievable_range(rp)?;
    let finish = |nu0: f64, iterations: usize| -> Result<ShootingResult> {
        let policy = optimal_control(rp, nu0)?;
        let traj = simulate_reduced(rp, &policy)?;
        Ok(ShootingResult {
            nu0,
            terminal_gt: traj.terminal_gt(),
            budget_eur: traj.total_budget_eur(),
            policy,
            iterations,
        })
    };
    if target_gt >= max - tol_gt {
        return finish(0.0, 0);
    }
    if target_gt < min - tol_gt || !target_gt.is_finite() {
        return Err(Error::InfeasibleTarget {
            target: target_gt,
            min,
            max,
        });
    }

    let mut lo = 0.0;
    let mut hi = 1.0e9;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let e = eval_terminal(rp, hi)?.emissions_gt;
        if e <= target_gt + tol_gt {
            if e >= target_gt - tol_gt {
                return finish(hi, iterations);
            }
            break;
        }
        if iterations >= MAX_BRACKET_STEPS {
            return Err(Error::NonConvergence {
                iterations,
                constraint_residual: e - target_gt,
                stationarity_residual: 0.0,
            });
        }
        lo = hi;
        hi *= 10.0;
    }

    for _ in 0..MAX_BISECTIONS {
        iterations += 1;
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        let e = eval_terminal(rp, mid)?.emissions_gt;
        if (e - target_gt).abs() <= tol_gt {
            return finish(mid, iterations);
        }
        if e > target_gt {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let e = eval_terminal(rp, hi)?.emissions_gt;
    Err(Error::NonConvergence {
        iterations,
        constraint_residual: e - target_gt,
        stationarity_residual: 0.0,
    })
}
