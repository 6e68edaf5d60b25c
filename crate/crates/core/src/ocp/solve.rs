//! Outer bisection on the emissions multiplier with an inner spectral
//! projected-gradient minimisation of the Lagrangian.

use log::debug;

use crate::error::{Error, Result};
use crate::fleet::{PolicyTrajectory, ScenarioResult};

use super::adjoint::{adjoint_sweep, gradient_u};
use super::problem::OcpProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Accepted `|ℰ(T) - Ē|` in Gt.
    pub tol_emissions_gt: f64,
    /// Projected-gradient norm relative to its value at the initial guess.
    pub tol_grad: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Constant incentive used as the starting point (euro).
    pub initial_incentive: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_emissions_gt: 1e-6,
            tol_grad: 1e-6,
            max_outer: 200,
            max_inner: 5_000,
            initial_incentive: 5_000.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub policy: PolicyTrajectory,
    pub trajectory: ScenarioResult,
    pub budget_geur: f64,
    pub terminal_gt: f64,
    /// Emissions multiplier `ν` in €/Gt.
    pub nu: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    /// Final projected-gradient norm relative to the initial one.
    pub stationarity_residual: f64,
    /// `ℰ(T) - Ē` in Gt.
    pub constraint_residual: f64,
    /// Terminal emissions under full-price and zero incentives.
    pub achievable_gt: (f64, f64),
}

struct Inner {
    policy: PolicyTrajectory,
    trajectory: ScenarioResult,
    iterations: usize,
    relative_pg: f64,
    converged: bool,
}

/// `‖P(g)‖_∞` where components pushing against an active bound are dropped.
fn projected_gradient_norm(u: &[f64], g: &[f64], caps: &[f64]) -> f64 {
    u.iter()
        .zip(g)
        .zip(caps)
        .map(|((&u, &g), &cap)| {
            if u <= 0.0 {
                g.min(0.0).abs()
            } else if u >= cap {
                g.max(0.0).abs()
            } else {
                g.abs()
            }
        })
        .fold(0.0, f64::max)
}

fn evaluate(
    problem: &OcpProblem,
    policy: &PolicyTrajectory,
    nu: f64,
) -> Result<(ScenarioResult, f64, Vec<f64>)> {
    let traj = problem.simulate(policy)?;
    let adj = adjoint_sweep(problem, policy, &traj, nu)?;
    let g = gradient_u(problem, policy, &traj, &adj)?;
    let l = traj.lagrangian(nu);
    Ok((traj, l, g))
}

const MEMORY: usize = 10;
const ARMIJO: f64 = 1e-4;

/// Minimises `I(T) + ν ℰ(T)` over the box from `start`.
fn minimise_lagrangian(
    problem: &OcpProblem,
    nu: f64,
    start: &PolicyTrajectory,
    opts: &SolverOptions,
) -> Result<Inner> {
    let caps = problem.caps();
    let project = |u: &mut [f64]| {
        for (x, &c) in u.iter_mut().zip(caps) {
            *x = x.clamp(0.0, c);
        }
    };

    let reference = problem.constant_policy(opts.initial_incentive);
    let mut reference_values = reference.values().to_vec();
    project(&mut reference_values);
    let (_, _, g_ref) = evaluate(
        problem,
        &PolicyTrajectory::new(reference.first_year(), reference_values.clone()),
        nu,
    )?;
    let pg_ref = projected_gradient_norm(&reference_values, &g_ref, caps);

    let mut u = start.values().to_vec();
    project(&mut u);
    let first = start.first_year();
    let mut policy = PolicyTrajectory::new(first, u.clone());
    let (mut traj, mut l, mut g) = evaluate(problem, &policy, nu)?;
    let mut history = vec![l];
    let mut pg = projected_gradient_norm(&u, &g, caps);
    let threshold = opts.tol_grad * pg_ref;
    let g_max = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut alpha = if g_max > 0.0 { 1_000.0 / g_max } else { 1.0 };
    let mut iterations = 0;

    while pg > threshold && iterations < opts.max_inner {
        iterations += 1;
        let mut trial: Vec<f64> = u.iter().zip(&g).map(|(x, d)| x - alpha * d).collect();
        project(&mut trial);
        let d: Vec<f64> = trial.iter().zip(&u).map(|(a, b)| a - b).collect();
        let gtd: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if gtd >= 0.0 {
            break;
        }
        let l_ref = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut step = 1.0;
        let accepted = loop {
            let cand: Vec<f64> = u.iter().zip(&d).map(|(x, dx)| x + step * dx).collect();
            let cand_policy = PolicyTrajectory::new(first, cand.clone());
            let (t_new, l_new, g_new) = evaluate(problem, &cand_policy, nu)?;
            if l_new <= l_ref + ARMIJO * step * gtd {
                break Some((cand, cand_policy, t_new, l_new, g_new));
            }
            step *= 0.5;
            if step < 1e-12 {
                break None;
            }
        };
        let Some((u_new, p_new, t_new, l_new, g_new)) = accepted else {
            debug!("line search stalled at ν = {nu:e} after {iterations} iterations");
            break;
        };
        let s: Vec<f64> = u_new.iter().zip(&u).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let ss: f64 = s.iter().map(|x| x * x).sum();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        alpha = if sy > 0.0 {
            (ss / sy).clamp(1e-12, 1e12)
        } else {
            1e12
        };
        u = u_new;
        policy = p_new;
        traj = t_new;
        l = l_new;
        g = g_new;
        history.push(l);
        if history.len() > MEMORY {
            history.remove(0);
        }
        pg = projected_gradient_norm(&u, &g, caps);
    }
    let relative_pg = if pg_ref > 0.0 { pg / pg_ref } else { 0.0 };
    Ok(Inner {
        policy,
        trajectory: traj,
        iterations,
        relative_pg,
        converged: pg <= threshold,
    })
}

/// Solves the full-order backcasting problem.
pub fn solve(problem: &OcpProblem, opts: &SolverOptions) -> Result<SolveReport> {
    let target = problem.target_gt();
    let tol = opts.tol_emissions_gt;
    let none = problem.constant_policy(0.0);
    let none_traj = problem.simulate(&none)?;
    let max = none_traj.terminal_emissions_gt();
    let full = problem.full_price_policy();
    let full_traj = problem.simulate(&full)?;
    let min = full_traj.terminal_emissions_gt();
    let range = (min, max);

    let report = |inner: Inner, nu: f64, outer: usize, inner_total: usize| SolveReport {
        budget_geur: inner.trajectory.total_budget_geur(),
        terminal_gt: inner.trajectory.terminal_emissions_gt(),
        constraint_residual: inner.trajectory.terminal_emissions_gt() - target,
        policy: inner.policy,
        trajectory: inner.trajectory,
        nu,
        outer_iterations: outer,
        inner_iterations: inner_total,
        stationarity_residual: inner.relative_pg,
        achievable_gt: range,
    };

    if target >= max {
        let inner = Inner {
            policy: none,
            trajectory: none_traj,
            iterations: 0,
            relative_pg: 0.0,
            converged: true,
        };
        return Ok(report(inner, 0.0, 0, 0));
    }
    if target < min - tol {
        return Err(Error::InfeasibleTarget { target, min, max });
    }

    let mut inner_total = 0;
    let mut outer = 0;
    let mut run = |nu: f64, start: &PolicyTrajectory| -> Result<Inner> {
        let r = minimise_lagrangian(problem, nu, start, opts)?;
        inner_total += r.iterations;
        debug!(
            "ν = {nu:.6e}: ℰ = {:.9} Gt, I = {:.6} G€, {} iterations, pg {:.2e}",
            r.trajectory.terminal_emissions_gt(),
            r.trajectory.total_budget_geur(),
            r.iterations,
            r.relative_pg
        );
        Ok(r)
    };
    let finish = |inner: Inner, nu: f64, outer: usize, inner_total: usize| {
        if !inner.converged {
            return Err(Error::NonConvergence {
                iterations: inner_total,
                constraint_residual: inner.trajectory.terminal_emissions_gt() - target,
                stationarity_residual: inner.relative_pg,
            });
        }
        Ok(report(inner, nu, outer, inner_total))
    };

    let initial = problem.constant_policy(opts.initial_incentive);
    let mut lo = 0.0;
    let mut lo_policy = initial.clone();
    let mut hi = 1e10;
    let mut hi_inner;
    loop {
        outer += 1;
        let r = run(hi, &lo_policy)?;
        let e = r.trajectory.terminal_emissions_gt();
        if (e - target).abs() <= tol {
            return finish(r, hi, outer, inner_total);
        }
        if e < target {
            hi_inner = r;
            break;
        }
        if outer >= opts.max_outer {
            return Err(Error::NonConvergence {
                iterations: inner_total,
                constraint_residual: e - target,
                stationarity_residual: r.relative_pg,
            });
        }
        lo = hi;
        lo_policy = r.policy;
        hi *= 10.0;
    }

    while outer < opts.max_outer {
        outer += 1;
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        let r = run(mid, &hi_inner.policy)?;
        let e = r.trajectory.terminal_emissions_gt();
        if (e - target).abs() <= tol {
            return finish(r, mid, outer, inner_total);
        }
        if e > target {
            lo = mid;
        } else {
            hi = mid;
            hi_inner = r;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Err(Error::NonConvergence {
        iterations: inner_total,
        constraint_residual: hi_inner.trajectory.terminal_emissions_gt() - target,
        stationarity_residual: hi_inner.relative_pg,
    })
}
