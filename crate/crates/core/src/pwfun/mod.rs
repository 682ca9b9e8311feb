//! Piecewise exponential-polynomial functions: the coefficient class and the
//! carrier of test-function bodies.
//!
//! Every function lives on a fixed open working interval, has finitely many
//! breakpoints and on each open piece is a finite sum of terms
//! `c (t - anchor)^p e^{r (t - anchor)}`. The class is closed under sums,
//! products, piecewise differentiation and integration, so all of these are
//! computed in closed form. One-sided limits of every derivative exist at
//! every point.

mod function;
mod matrix;
mod piece;

pub use function::{Interval, PiecewiseFunction, Side};
pub use matrix::PiecewiseMatrix;
pub use piece::{Piece, Term};
