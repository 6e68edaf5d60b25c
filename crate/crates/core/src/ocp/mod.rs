//! Full-order optimal control of the EV incentive.

mod adjoint;
mod problem;
mod solve;

pub use adjoint::{adjoint_sweep, gradient_u, hamiltonian, AdjointField};
pub use problem::OcpProblem;
pub use solve::{solve, SolveReport, SolverOptions};
