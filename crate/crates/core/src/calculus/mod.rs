//! Product with piecewise coefficients, the multi-valued derivative and the
//! primitive normalized to vanish left of a base point.

use crate::dist::{Atom, Distribution};
use crate::error::{Error, Result};
use crate::pwfun::{PiecewiseFunction, PiecewiseMatrix, Side};
use crate::scalar::{binomial, re, sign, Complex, Tolerance};

/// Default bound on atom order.
pub const DEFAULT_K_MAX: usize = 8;

/// Finite element of Δ: `Σ c (δ_t^+ - δ_t^-)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeltaClassElement {
    pub entries: Vec<(f64, Complex)>,
}

impl DeltaClassElement {
    pub fn new(entries: Vec<(f64, Complex)>) -> Self {
        DeltaClassElement { entries }
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.entries.iter().map(|&(t, c)| Atom::jump(t, 0, c))
    }
}

/// Picks one representative of `D(f) = df/dt + Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeSelection {
    /// α used at every jump of the regular part without an override.
    pub default_alpha: Complex,
    pub overrides: Vec<(f64, Complex)>,
    pub extra_delta_class: Option<DeltaClassElement>,
    pub k_max: usize,
}

impl Default for DerivativeSelection {
    fn default() -> Self {
        DerivativeSelection {
            default_alpha: re(1.0),
            overrides: vec![],
            extra_delta_class: None,
            k_max: DEFAULT_K_MAX,
        }
    }
}

impl DerivativeSelection {
    pub fn with_alpha(alpha: Complex) -> Self {
        DerivativeSelection { default_alpha: alpha, ..Default::default() }
    }

    pub fn alpha_at(&self, site: f64) -> Complex {
        self.overrides
            .iter()
            .find(|(s, _)| *s == site)
            .map_or(self.default_alpha, |&(_, a)| a)
    }
}

/// `g f`, defined by `(g f, φ) = (f, g φ)`.
///
/// Atoms expand by the one-sided Leibniz rule: an atom `(τ, k, p, m)` contributes
/// `p (-1)^{k-j} C(k,j) g^{(k-j)}(τ+)` to the plus weight of order `j`, and the
/// same with `m` and `g^{(k-j)}(τ-)` to the minus weight.
pub fn multiply(g: &PiecewiseFunction, f: &Distribution) -> Result<Distribution> {
    g.same_interval(f.regular_part())?;
    let regular = g.mul(f.regular_part())?;
    let mut atoms = Vec::new();
    for a in f.atoms() {
        let k = a.order;
        let right = g.one_sided_jet(a.site, Side::Right, k)?;
        let left = g.one_sided_jet(a.site, Side::Left, k)?;
        for j in 0..=k {
            let c = sign(k - j) * binomial(k, j);
            atoms.push(Atom::new(a.site, j, a.plus * right[k - j] * c, a.minus * left[k - j] * c));
        }
    }
    Distribution::new(regular, atoms)
}

/// `(A x)_i = Σ_j A_ij x_j` with each product taken by [`multiply`].
pub fn multiply_matrix(a: &PiecewiseMatrix, x: &[Distribution]) -> Result<Vec<Distribution>> {
    if a.cols() != x.len() {
        return Err(Error::Dimension(format!("{}x{} matrix times vector of length {}", a.rows(), a.cols(), x.len())));
    }
    (0..a.rows())
        .map(|i| {
            let mut acc = Distribution::zero(a.interval());
            for (j, xj) in x.iter().enumerate() {
                acc = acc.add(&multiply(a.get(i, j), xj)?)?;
            }
            Ok(acc)
        })
        .collect()
}

/// The representative of `D(f)` fixed by `sel`.
pub fn derivative(f: &Distribution, sel: &DerivativeSelection) -> Result<Distribution> {
    derivative_with(f, sel, &Tolerance::default())
}

pub fn derivative_with(f: &Distribution, sel: &DerivativeSelection, tol: &Tolerance) -> Result<Distribution> {
    if let Some(k) = f.max_order() {
        if k + 1 > sel.k_max {
            return Err(Error::OrderOverflow { order: k + 1, k_max: sel.k_max });
        }
    }
    let g = f.regular_part();
    let mut atoms: Vec<Atom> = g
        .jump_sites(tol)
        .into_iter()
        .map(|(t, j)| Atom::delta(t, 0, sel.alpha_at(t), j))
        .collect();
    atoms.extend(f.atoms().iter().map(|a| Atom::new(a.site, a.order + 1, a.plus, a.minus)));
    if let Some(extra) = &sel.extra_delta_class {
        atoms.extend(extra.atoms());
    }
    Distribution::new(g.differentiate_ae(), atoms)
}

/// True when `g - df/dt ∈ Δ`.
pub fn is_derivative_of(g: &Distribution, f: &Distribution) -> bool {
    is_derivative_of_with(g, f, &Tolerance::default())
}

pub fn is_derivative_of_with(g: &Distribution, f: &Distribution, tol: &Tolerance) -> bool {
    let sel = DerivativeSelection { k_max: usize::MAX, ..Default::default() };
    let Ok(d) = derivative_with(f, &sel, tol) else {
        return false;
    };
    let Ok(diff) = g.sub(&d) else {
        return false;
    };
    diff.regular_part().is_zero(tol)
        && diff
            .atoms()
            .iter()
            .all(|a| a.is_zero(tol) || (a.order == 0 && a.is_jump(tol)))
}

/// Primitive vanishing left of `t0`.
///
/// The order-0 atom `(τ, 0, p, m)` becomes `(p + m) θ_τ`; its jump component
/// has zero primitive under this normalization and is dropped.
pub fn primitive(f: &Distribution, t0: f64) -> Result<Distribution> {
    primitive_with(f, t0, &Tolerance::default())
}

pub fn primitive_with(f: &Distribution, t0: f64, tol: &Tolerance) -> Result<Distribution> {
    let interval = f.interval();
    interval.check(t0)?;
    if !f.vanishes_left_of(t0, tol) {
        return Err(Error::Precondition(format!("distribution does not vanish left of t0 = {t0}")));
    }
    let mut regular = f.regular_part().antiderivative(t0)?;
    let mut atoms = Vec::new();
    for a in f.atoms() {
        if a.order == 0 {
            let w = a.classical_weight();
            if w != re(0.0) {
                regular = regular.add(&PiecewiseFunction::step(interval, a.site)?.scale(w))?;
            }
        } else {
            atoms.push(Atom::new(a.site, a.order - 1, a.plus, a.minus));
        }
    }
    Distribution::new(regular, atoms)
}

/// `n`-fold primitive from `t0`.
pub fn primitive_n(f: &Distribution, t0: f64, n: usize) -> Result<Distribution> {
    (0..n).try_fold(f.clone(), |acc, _| primitive(&acc, t0))
}
