//! Semi-analytic solution of the reduced-order (two age class) problem.

mod lambert;
mod model;
mod shooting;

pub use lambert::{lambert_w0, lambert_w0_exp};
pub use model::{
    adjoint_closed_form, closed_form_stock, eval_terminal, explicit_terminal, hamiltonian,
    optimal_control, simulate_reduced, stationarity_residual, unconstrained_control, AdjointPair,
    LambertCoefficients, ReducedParams, ReducedTrajectory, TerminalValues,
};
pub use shooting::{achievable_range, shoot_nu0, ShootingResult};
