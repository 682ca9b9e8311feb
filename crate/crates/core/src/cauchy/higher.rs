use nalgebra::DMatrix;

use crate::dist::{Atom, Distribution};
use crate::error::{Error, Result};
use crate::pwfun::{Interval, PiecewiseFunction, PiecewiseMatrix};
use crate::scalar::{re, Complex, Tolerance};

use super::solve::{solve_cauchy_with, CauchyProblem, SolutionBundle, SolverConfig};

/// Row-major matrix of distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct DistMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Distribution>,
}

impl DistMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Distribution>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(DistMatrix { rows, cols, entries })
    }

    pub fn scalar(d: Distribution) -> Self {
        DistMatrix { rows: 1, cols: 1, entries: vec![d] }
    }

    pub fn zeros(interval: Interval, rows: usize, cols: usize) -> Self {
        DistMatrix { rows, cols, entries: vec![Distribution::zero(interval); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Distribution {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Distribution] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<Distribution> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    fn from_columns(cols: Vec<Vec<Distribution>>) -> Self {
        let rows = cols[0].len();
        let ncols = cols.len();
        let entries = (0..rows * ncols).map(|k| cols[k % ncols][k / ncols].clone()).collect();
        DistMatrix { rows, cols: ncols, entries }
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// `X^(m) - A_{m-1} X^(m-1) - ... - A_0 X = F` with `X^(k) = X_k` left of `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderProblem {
    /// `A_0, ..., A_{m-1}`, each `n x n`.
    pub coeffs: Vec<PiecewiseMatrix>,
    /// `n x p` forcing.
    pub f: DistMatrix,
    pub t0: f64,
    /// `X_0, ..., X_{m-1}`, each `n x p`.
    pub ics: Vec<DMatrix<Complex>>,
    pub alpha_ic: Complex,
}

impl HigherOrderProblem {
    /// Problem with zero initial data and `alpha_ic = 1`.
    pub fn new(coeffs: Vec<PiecewiseMatrix>, f: DistMatrix, t0: f64) -> Self {
        let m = coeffs.len();
        let (n, p) = (f.rows(), f.cols());
        HigherOrderProblem { coeffs, f, t0, ics: vec![DMatrix::zeros(n, p); m], alpha_ic: re(1.0) }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
}

/// Solution `Z` with every derivative `Z, Z', ..., Z^(m)` and the per-column
/// companion bundles.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderSolution {
    pub x: DistMatrix,
    pub derivatives: Vec<DistMatrix>,
    pub companion: PiecewiseMatrix,
    pub columns: Vec<SolutionBundle>,
}

/// Companion matrix over the state `(Y_1, ..., Y_m) = (X, X', ..., X^(m-1))`.
pub fn companion_matrix(coeffs: &[PiecewiseMatrix]) -> Result<PiecewiseMatrix> {
    let m = coeffs.len();
    if m == 0 {
        return Err(Error::Dimension("equation order must be at least 1".into()));
    }
    let n = coeffs[0].rows();
    for c in coeffs {
        if c.rows() != n || c.cols() != n {
            return Err(Error::Dimension("coefficients must share one square shape".into()));
        }
    }
    let interval = coeffs[0].interval();
    let zero = PiecewiseFunction::zero(interval);
    let one = PiecewiseFunction::constant(interval, re(1.0));
    let size = m * n;
    let mut entries = Vec::with_capacity(size * size);
    for r in 0..size {
        let (br, i) = (r / n, r % n);
        for c in 0..size {
            let (bc, j) = (c / n, c % n);
            let e = if br + 1 == m {
                coeffs[bc].get(i, j).clone()
            } else if bc == br + 1 && i == j {
                one.clone()
            } else {
                zero.clone()
            };
            entries.push(e);
        }
    }
    PiecewiseMatrix::new(size, size, entries)
}

pub fn solve_higher_order(p: &HigherOrderProblem) -> Result<HigherOrderSolution> {
    solve_higher_order_with(p, &SolverConfig::default())
}

/// Solves each column through the first-order companion system with the
/// initial-condition atoms `X_{k-1} δ_{t0}^α` injected in block `k`.
pub fn solve_higher_order_with(p: &HigherOrderProblem, cfg: &SolverConfig) -> Result<HigherOrderSolution> {
    let m = p.order();
    let companion = companion_matrix(&p.coeffs)?;
    let n = p.coeffs[0].rows();
    let interval = companion.interval();
    if p.f.rows() != n {
        return Err(Error::Dimension(format!("forcing has {} rows, coefficients are {n}x{n}", p.f.rows())));
    }
    if p.ics.len() != m || p.ics.iter().any(|x| x.nrows() != n || x.ncols() != p.f.cols()) {
        return Err(Error::Dimension(format!("expected {m} initial matrices of shape {n}x{}", p.f.cols())));
    }
    let delta = |order: usize, w: Complex| -> Atom { Atom::delta(p.t0, order, p.alpha_ic, w) };

    let mut columns = Vec::with_capacity(p.f.cols());
    let mut derivs: Vec<Vec<Vec<Distribution>>> = vec![Vec::new(); m + 1];
    for col in 0..p.f.cols() {
        let mut f = vec![Distribution::zero(interval); (m - 1) * n];
        f.extend(p.f.column(col));
        let x0 = (0..m).flat_map(|k| (0..n).map(move |i| (k, i))).map(|(k, i)| p.ics[k][(i, col)]).collect();
        let cp = CauchyProblem { a: companion.clone(), f, t0: p.t0, x0, alpha_ic: p.alpha_ic };
        let bundle = solve_cauchy_with(&cp, cfg)?;
        let block = |v: &[Distribution], k: usize| v[k * n..(k + 1) * n].to_vec();

        derivs[0].push(block(&bundle.x, 0));
        // Z^(k-1) = Y_k + Σ_{j<=k-2} X_j δ^{(k-j-2)α}
        for k in 2..=m {
            let y = block(&bundle.x, k - 1);
            let z = (0..n)
                .map(|i| y[i].add_atoms((0..=k - 2).map(|j| delta(k - j - 2, p.ics[j][(i, col)]))))
                .collect::<Result<Vec<_>>>()?;
            derivs[k - 1].push(z);
        }
        // Z^(m) = Y_m' + Σ_{j<=m-2} X_j δ^{(m-j-1)α}
        let ym = block(&bundle.x_prime, m - 1);
        let z = (0..n)
            .map(|i| ym[i].add_atoms((0..m.saturating_sub(1)).map(|j| delta(m - j - 1, p.ics[j][(i, col)]))))
            .collect::<Result<Vec<_>>>()?;
        derivs[m].push(z);
        columns.push(bundle);
    }
    let derivatives: Vec<DistMatrix> = derivs.into_iter().map(DistMatrix::from_columns).collect();
    Ok(HigherOrderSolution { x: derivatives[0].clone(), derivatives, companion, columns })
}
