//! Mollification oracle: atoms are replaced by scaled polynomial bumps, the
//! resulting classical problems are integrated numerically, and pairings are
//! compared with the symbolic solution as ε shrinks.

mod family;
mod integrate;
mod quadrature;
mod report;

pub use family::{bump_coefficients, one_sided_kernels, regularize, DeltaFamily, PCDeltaFamily, DEFAULT_EPSILONS};
pub use integrate::{ode_solve_numeric, ode_solve_scalar, Trajectory};
pub use quadrature::{gauss_legendre, integrate};
pub use report::{
    convergence_report, convergence_report_with, families_for, pair_numeric, ConvergenceReport, ConvergenceRow,
    NOISE_FLOOR, ODE_TOL,
};
