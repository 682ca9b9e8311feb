//! Scalar type, comparison tolerances and small combinatorial helpers.

use serde::{Deserialize, Serialize};

/// Complex scalar used for every coefficient and weight.
pub type Complex = num_complex::Complex64;

/// Shorthand for a real number lifted to [`Complex`].
#[inline]
pub fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

/// Comparison tolerance used only in equality predicates; the algebra itself
/// is closed-form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-10, abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerance { rel, abs }
    }

    /// `|a - b| <= abs + rel * max(|a|, |b|)`.
    pub fn eq(&self, a: Complex, b: Complex) -> bool {
        let d = (a - b).norm();
        d <= self.abs + self.rel * a.norm().max(b.norm())
    }

    pub fn eq_real(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }

    pub fn is_zero(&self, a: Complex) -> bool {
        a.norm() <= self.abs
    }
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
pub fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    ((n - k + 1)..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `(-1)^k`.
#[inline]
pub fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}
