//! Linear Cauchy problems `x' - A(t) x = f` in the distribution space, solved
//! as `x = X y` with `y` the primitive of `X⁻¹ f`, and their higher-order
//! counterparts through the companion system.

mod fundamental;
mod higher;
mod solve;

pub use fundamental::{expm, expm_pieces, fundamental_matrix, fundamental_pair};
pub use higher::{
    companion_matrix, solve_higher_order, solve_higher_order_with, DistMatrix, HigherOrderProblem,
    HigherOrderSolution,
};
pub use solve::{
    alpha_independence_check, alpha_independence_check_with, classical_homogeneous, residual_check,
    residual_check_with, solve_cauchy, solve_cauchy_with, verification_suite, CauchyProblem,
    ResidualReport, SolutionBundle, SolverConfig, RESIDUAL_TOL,
};
