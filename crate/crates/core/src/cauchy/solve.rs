use nalgebra::DVector;

use crate::calculus::{is_derivative_of_with, multiply_matrix, primitive_with, DEFAULT_K_MAX};
use crate::dist::{pair, probe, Atom, Distribution, TestFunction};
use crate::error::{Error, Result};
use crate::pwfun::{Interval, PiecewiseFunction, PiecewiseMatrix};
use crate::scalar::{re, Complex, Tolerance};

use super::fundamental::fundamental_pair;

/// `x' - A x = f` with `x = x0` left of `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyProblem {
    pub a: PiecewiseMatrix,
    pub f: Vec<Distribution>,
    pub t0: f64,
    pub x0: Vec<Complex>,
    /// α of the injected initial-condition atom `x0 δ_{t0}^α`.
    pub alpha_ic: Complex,
}

impl CauchyProblem {
    /// Problem with zero initial data and `alpha_ic = 1`.
    pub fn new(a: PiecewiseMatrix, f: Vec<Distribution>, t0: f64) -> Self {
        let n = f.len();
        CauchyProblem { a, f, t0, x0: vec![re(0.0); n], alpha_ic: re(1.0) }
    }

    pub fn with_x0(mut self, x0: Vec<Complex>) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_alpha_ic(mut self, alpha: Complex) -> Self {
        self.alpha_ic = alpha;
        self
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn interval(&self) -> Interval {
        self.a.interval()
    }

    /// `f + x0 δ_{t0}^{alpha_ic}`.
    pub fn total_forcing(&self) -> Result<Vec<Distribution>> {
        self.f
            .iter()
            .zip(&self.x0)
            .map(|(fi, &xi)| fi.add_atoms([Atom::delta(self.t0, 0, self.alpha_ic, xi)]))
            .collect()
    }

    fn validate(&self, k_max: usize, tol: &Tolerance) -> Result<()> {
        let n = self.a.rows();
        if !self.a.is_square() {
            return Err(Error::Dimension(format!("A is {}x{}", self.a.rows(), self.a.cols())));
        }
        if self.f.len() != n || self.x0.len() != n {
            return Err(Error::Dimension(format!(
                "A is {n}x{n}, f has {} entries, x0 has {}",
                self.f.len(),
                self.x0.len()
            )));
        }
        self.interval().check(self.t0)?;
        for fi in &self.f {
            fi.regular_part().same_interval(self.a.get(0, 0))?;
            if !fi.regular_part().vanishes_left_of(self.t0, tol) {
                return Err(Error::Precondition(format!("forcing does not vanish left of t0 = {}", self.t0)));
            }
            for at in fi.atoms() {
                if at.site <= self.t0 {
                    return Err(Error::Precondition(format!(
                        "forcing atom at {} is not right of t0 = {}",
                        at.site, self.t0
                    )));
                }
                if at.order + 1 > k_max {
                    return Err(Error::OrderOverflow { order: at.order + 1, k_max });
                }
            }
        }
        Ok(())
    }
}

/// Solution `x`, its certified derivative `x' = f_total + A x`, the fundamental
/// matrix and the intermediate primitive `y` with `x = X y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBundle {
    pub x: Vec<Distribution>,
    pub x_prime: Vec<Distribution>,
    pub fundamental: PiecewiseMatrix,
    pub fundamental_inv: PiecewiseMatrix,
    pub y: Vec<Distribution>,
}

impl SolutionBundle {
    /// True when every `x_prime[i]` is a derivative of `x[i]`.
    pub fn is_certified(&self, tol: &Tolerance) -> bool {
        self.x.iter().zip(&self.x_prime).all(|(x, d)| is_derivative_of_with(d, x, tol))
    }
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub k_max: usize,
    pub tol: Tolerance,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { k_max: DEFAULT_K_MAX, tol: Tolerance::default() }
    }
}

pub fn solve_cauchy(p: &CauchyProblem) -> Result<SolutionBundle> {
    solve_cauchy_with(p, &SolverConfig::default())
}

/// `x = X y` where `y` is the primitive from `t0` of `X⁻¹ (f + x0 δ_{t0}^α)`.
pub fn solve_cauchy_with(p: &CauchyProblem, cfg: &SolverConfig) -> Result<SolutionBundle> {
    p.validate(cfg.k_max, &cfg.tol)?;
    let h = p.total_forcing()?;
    let (xm, xinv) = fundamental_pair(&p.a, p.t0)?;
    let u = multiply_matrix(&xinv, &h)?;
    let y = u.iter().map(|ui| primitive_with(ui, p.t0, &cfg.tol)).collect::<Result<Vec<_>>>()?;
    let x = multiply_matrix(&xm, &y)?;
    let ax = multiply_matrix(&p.a, &x)?;
    let x_prime = h.iter().zip(&ax).map(|(hi, ai)| hi.add(ai)).collect::<Result<Vec<_>>>()?;
    Ok(SolutionBundle { x, x_prime, fundamental: xm, fundamental_inv: xinv, y })
}

/// Outcome of pairing the defining identity against a suite of test functions.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Largest `|(x' - A x - f_total, φ)|` over the suite and all components.
    pub max_residual: f64,
    /// Per test function, the largest residual over components.
    pub residuals: Vec<f64>,
    /// Whether each `x'[i]` is a derivative of `x[i]`.
    pub derivative_certified: bool,
    pub threshold: f64,
    pub passed: bool,
}

/// Default residual threshold.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub fn residual_check(p: &CauchyProblem, s: &SolutionBundle, suite: &[TestFunction]) -> Result<ResidualReport> {
    residual_check_with(p, s, suite, RESIDUAL_TOL, &Tolerance::default())
}

pub fn residual_check_with(
    p: &CauchyProblem,
    s: &SolutionBundle,
    suite: &[TestFunction],
    threshold: f64,
    tol: &Tolerance,
) -> Result<ResidualReport> {
    let h = p.total_forcing()?;
    let ax = multiply_matrix(&p.a, &s.x)?;
    let defect = s
        .x_prime
        .iter()
        .zip(&ax)
        .zip(&h)
        .map(|((d, a), f)| d.sub(a)?.sub(f))
        .collect::<Result<Vec<_>>>()?;
    let mut residuals = Vec::with_capacity(suite.len());
    for phi in suite {
        let mut worst = 0.0f64;
        for d in &defect {
            worst = worst.max(pair(d, phi)?.norm());
        }
        residuals.push(worst);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let derivative_certified = s.is_certified(tol);
    Ok(ResidualReport {
        max_residual,
        residuals,
        derivative_certified,
        threshold,
        passed: derivative_certified && max_residual <= threshold,
    })
}

/// True when the solution `x` is the same for every `alpha_ic` in `alphas`.
pub fn alpha_independence_check(p: &CauchyProblem, alphas: &[Complex]) -> Result<bool> {
    alpha_independence_check_with(p, alphas, &SolverConfig::default())
}

pub fn alpha_independence_check_with(p: &CauchyProblem, alphas: &[Complex], cfg: &SolverConfig) -> Result<bool> {
    let mut first: Option<Vec<Distribution>> = None;
    for &a in alphas {
        let x = solve_cauchy_with(&p.clone().with_alpha_ic(a), cfg)?.x;
        match &first {
            None => first = Some(x),
            Some(x1) => {
                if !x1.iter().zip(&x).all(|(u, v)| u.approx_eq(v, &cfg.tol)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Deterministic suite of `count` test functions concentrated around `sites`:
/// order-0..2 probes, cut quadratics and cut exponentials whose windows contain
/// a site strictly inside.
pub fn verification_suite(interval: Interval, sites: &[f64], count: usize) -> Result<Vec<TestFunction>> {
    let mut sites: Vec<f64> = sites.iter().copied().filter(|s| interval.contains(*s)).collect();
    sites.sort_by(f64::total_cmp);
    sites.dedup();
    if sites.is_empty() {
        let mid = match (interval.lo.is_finite(), interval.hi.is_finite()) {
            (true, true) => 0.5 * (interval.lo + interval.hi),
            (true, false) => interval.lo + 1.0,
            (false, true) => interval.hi - 1.0,
            (false, false) => 0.0,
        };
        sites.push(mid);
    }
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let s = sites[j % sites.len()];
        let mut room = (s - interval.lo).min(interval.hi - s).min(1.0);
        for &o in &sites {
            if o != s {
                room = room.min((o - s).abs());
            }
        }
        let w = 0.45 * room;
        let variant = j / sites.len();
        let skew = 0.5 + 0.1 * ((j % 5) as f64);
        let phi = match variant % 3 {
            0 => probe(interval, (variant / 3) % 3, s, (s - w, s + w))?,
            1 => {
                let c = s - 0.2 * w;
                let q = PiecewiseFunction::exp_poly(interval, re(1.0), 2, re(0.0), c)
                    .add(&PiecewiseFunction::constant(interval, re(skew)))?;
                TestFunction::cut(&q, s - w, s + skew * w)?
            }
            _ => {
                let e = PiecewiseFunction::exp_poly(interval, re(1.0), 1, Complex::new(-0.5, 0.3 * skew), s)
                    .add(&PiecewiseFunction::constant(interval, re(1.0)))?;
                TestFunction::cut(&e, s - skew * w, s + w)?
            }
        };
        out.push(phi);
    }
    Ok(out)
}

/// Classical matrix-exponential solution of the homogeneous problem evaluated at `t > t0`.
pub fn classical_homogeneous(p: &CauchyProblem, t: f64) -> Result<DVector<Complex>> {
    let (xm, _) = fundamental_pair(&p.a, p.t0)?;
    Ok(xm.eval(t) * DVector::from_vec(p.x0.clone()))
}
