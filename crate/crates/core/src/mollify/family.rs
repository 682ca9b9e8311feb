use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::pwfun::{Interval, Piece, PiecewiseFunction, Term};
use crate::scalar::{binomial, factorial, re, sign, Complex};

/// Default ε grid.
pub const DEFAULT_EPSILONS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

/// Coefficients in `u` of `ρ₊(u) = c_s u^{s+1} (1-u)^{s+1}` on `(0, 1)`, normalized to unit mass.
///
/// The bump is symmetric about `1/2`, vanishes to order `s + 1` at both ends and is
/// therefore `C^s` once extended by zero.
pub fn bump_coefficients(s: usize) -> Vec<f64> {
    let a = s + 1;
    let c = factorial(2 * a + 1) / (factorial(a) * factorial(a));
    let mut out = vec![0.0; 2 * a + 1];
    for j in 0..=a {
        out[a + j] = c * binomial(a, j) * sign(j);
    }
    out
}

/// Scaled one-sided kernels `(ρ₊^ε, ρ₋^ε)` at `site`, supported in `(τ, τ+ε)` and `(τ-ε, τ)`.
pub fn one_sided_kernels(interval: Interval, site: f64, s: usize, eps: f64) -> Result<(PiecewiseFunction, PiecewiseFunction)> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("non-positive ε = {eps}")));
    }
    interval.check(site - eps)?;
    interval.check(site + eps)?;
    let terms: Vec<Term> = bump_coefficients(s)
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| Term::new(re(c / eps.powi(j as i32 + 1)), j as u32, re(0.0)))
        .collect();
    let bps = vec![site - eps, site, site + eps];
    // ρ₋(u) = ρ₊(-u) = ρ₊(1 + u), i.e. the same polynomial in t - (τ - ε)
    let left = Piece::new(site - eps, terms.clone());
    let right = Piece::new(site, terms);
    let z = |a: f64| Piece::zero(a);
    let plus = PiecewiseFunction::from_parts(interval, bps.clone(), vec![z(0.0), z(site - eps), right, z(site + eps)])?;
    let minus = PiecewiseFunction::from_parts(interval, bps, vec![z(0.0), left, z(site), z(site + eps)])?;
    Ok((plus, minus))
}

/// Delta family `ρ_τ^ε = α ρ₊^ε + (1 - α) ρ₋^ε` of smoothness `C^s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaFamily {
    pub site: f64,
    pub alpha: Complex,
    pub smoothness: usize,
    pub epsilons: Vec<f64>,
}

impl DeltaFamily {
    pub fn new(site: f64, alpha: Complex, smoothness: usize) -> Self {
        DeltaFamily { site, alpha, smoothness, epsilons: DEFAULT_EPSILONS.to_vec() }
    }

    pub fn with_epsilons(mut self, epsilons: Vec<f64>) -> Self {
        self.epsilons = epsilons;
        self
    }

    /// `ρ_τ^ε`.
    pub fn kernel(&self, interval: Interval, eps: f64) -> Result<PiecewiseFunction> {
        self.kernel_derivative(interval, eps, 0)
    }

    /// `(d/dt)^k ρ_τ^ε`, for `k <= smoothness`.
    pub fn kernel_derivative(&self, interval: Interval, eps: f64, k: usize) -> Result<PiecewiseFunction> {
        let (p, m) = self.derivative_pair(interval, eps, k)?;
        p.scale(self.alpha).add(&m.scale(re(1.0) - self.alpha))
    }

    fn derivative_pair(&self, interval: Interval, eps: f64, k: usize) -> Result<(PiecewiseFunction, PiecewiseFunction)> {
        if k > self.smoothness {
            return Err(Error::Precondition(format!(
                "derivative order {k} exceeds family smoothness {}",
                self.smoothness
            )));
        }
        let (mut p, mut m) = one_sided_kernels(interval, self.site, self.smoothness, eps)?;
        for _ in 0..k {
            p = p.differentiate_ae();
            m = m.differentiate_ae();
        }
        Ok((p, m))
    }
}

/// Replaces every atom `(τ, k, p, m)` by `p (ρ₊^ε)^{(k)} + m (ρ₋^ε)^{(k)}` using the family at `τ`.
///
/// This is `(p + m)` times the family member with `α = p / (p + m)`, and
/// `c (ρ^{α=1} - ρ^{α=0})` for a jump element.
pub fn regularize(f: &Distribution, fams: &[DeltaFamily], eps: f64) -> Result<PiecewiseFunction> {
    let interval = f.interval();
    let mut out = f.regular_part().clone();
    for a in f.atoms() {
        let fam = fams
            .iter()
            .find(|fam| fam.site == a.site)
            .ok_or_else(|| Error::Precondition(format!("no delta family for site {}", a.site)))?;
        let (p, m) = fam.derivative_pair(interval, eps, a.order)?;
        out = out.add(&p.scale(a.plus))?.add(&m.scale(a.minus))?;
    }
    Ok(out)
}

/// Piecewise-constant delta sequence at `site`:
/// `f_k = 2k (α χ_{(τ, τ+1/(2k))} + (1-α) χ_{(τ-1/(2k), τ)})`.
///
/// The factor `2k` gives each half unit mass, so `f_k → δ_τ^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct PCDeltaFamily {
    pub site: f64,
    pub alpha: Complex,
    pub ks: Vec<usize>,
}

impl PCDeltaFamily {
    pub fn new(site: f64, alpha: Complex, ks: Vec<usize>) -> Self {
        PCDeltaFamily { site, alpha, ks }
    }

    pub fn member(&self, interval: Interval, k: usize) -> Result<PiecewiseFunction> {
        if k == 0 {
            return Err(Error::Domain("sequence index must be positive".into()));
        }
        let h = 1.0 / (2.0 * k as f64);
        let right = PiecewiseFunction::indicator(interval, self.site, self.site + h)?;
        let left = PiecewiseFunction::indicator(interval, self.site - h, self.site)?;
        Ok(right.scale(self.alpha).add(&left.scale(re(1.0) - self.alpha))?.scale(re(2.0 * k as f64)))
    }

    pub fn members(&self, interval: Interval) -> Result<Vec<(usize, PiecewiseFunction)>> {
        self.ks.iter().map(|&k| Ok((k, self.member(interval, k)?))).collect()
    }
}
