//! Distributions over regulated (discontinuous) test functions.
//!
//! The crate implements a computable fragment of the space of distributions
//! whose test functions are compactly supported, piecewise smooth functions
//! with first-kind discontinuities. In this space products with discontinuous
//! coefficients are well defined, the delta function splits into right and
//! left halves, and differentiation is multi-valued modulo a class of pure
//! jump functionals.
//!
//! Modules:
//!
//! - [`pwfun`]: exact piecewise exponential-polynomial functions (coefficients and
//!   test-function bodies).
//! - [`dist`]: distributions (regular part plus one-sided delta atoms), test
//!   functions, pairing, restriction to smooth test functions, kernel coefficients.
//! - [`calculus`]: multiplication by piecewise coefficients, derivative, primitive.
//! - [`cauchy`]: solvers for `x' - A(t) x = f` and higher order equations.
//! - [`mollify`]: delta families, a numerical ODE integrator and convergence reports
//!   used as an independent oracle.
//! - [`cli`]: expression language, serialization records and the command dispatcher.

pub mod calculus;
pub mod cauchy;
pub mod cli;
pub mod dist;
pub mod error;
pub mod mollify;
pub mod pwfun;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Complex, Tolerance};
