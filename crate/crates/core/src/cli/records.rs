//! JSON records for functions, distributions, problems and solutions.
//!
//! Inputs accept either a full record or an expression string wherever a
//! function, matrix or distribution is expected.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cauchy::{CauchyProblem, DistMatrix, HigherOrderProblem, HigherOrderSolution, ResidualReport, SolutionBundle};
use crate::dist::{Atom, Distribution, TestFunction};
use crate::error::{Error, Result};
use crate::pwfun::{Interval, Piece, PiecewiseFunction, PiecewiseMatrix, Term};
use crate::scalar::{re, Complex};

use super::eval::{default_interval, eval};
use super::parse::parse;
use super::render;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff_re: f64,
    pub coeff_im: f64,
    pub power: u32,
    pub rate_re: f64,
    pub rate_im: f64,
    pub anchor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub interval: [f64; 2],
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<TermRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub entries: Vec<FunctionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub site: f64,
    pub order: usize,
    pub plus_re: f64,
    pub plus_im: f64,
    pub minus_re: f64,
    pub minus_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRecord {
    pub regular: FunctionRecord,
    pub atoms: Vec<AtomRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionRecord {
    pub body: FunctionRecord,
    pub support: [f64; 2],
}

/// A record or an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Input<R> {
    Text(String),
    Record(R),
}

/// `[re, im]` pair or a plain real number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexInput {
    pub fn value(self) -> Complex {
        match self {
            ComplexInput::Real(x) => re(x),
            ComplexInput::Pair([a, b]) => Complex::new(a, b),
        }
    }
}

impl From<&PiecewiseFunction> for FunctionRecord {
    fn from(f: &PiecewiseFunction) -> Self {
        let iv = f.interval();
        let pieces = f
            .pieces()
            .iter()
            .map(|p| {
                p.terms()
                    .iter()
                    .map(|t| TermRecord {
                        coeff_re: t.coeff.re,
                        coeff_im: t.coeff.im,
                        power: t.power,
                        rate_re: t.rate.re,
                        rate_im: t.rate.im,
                        anchor: p.anchor(),
                    })
                    .collect()
            })
            .collect();
        FunctionRecord { interval: [iv.lo, iv.hi], breakpoints: f.breakpoints().to_vec(), pieces }
    }
}

impl FunctionRecord {
    pub fn to_function(&self) -> Result<PiecewiseFunction> {
        let iv = Interval::new(self.interval[0], self.interval[1])?;
        if self.pieces.len() != self.breakpoints.len() + 1 {
            return Err(Error::Input(format!(
                "{} breakpoints need {} pieces, found {}",
                self.breakpoints.len(),
                self.breakpoints.len() + 1,
                self.pieces.len()
            )));
        }
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, terms)| {
                let default_anchor = if i == 0 { self.breakpoints.first().copied().unwrap_or(0.0) } else { self.breakpoints[i - 1] };
                let anchor = terms.first().map_or(default_anchor, |t| t.anchor);
                terms.iter().fold(Piece::zero(anchor), |acc, t| {
                    let term = Term::new(Complex::new(t.coeff_re, t.coeff_im), t.power, Complex::new(t.rate_re, t.rate_im));
                    acc.add(&Piece::new(t.anchor, vec![term]))
                })
            })
            .collect();
        PiecewiseFunction::from_parts(iv, self.breakpoints.clone(), pieces)
    }
}

impl From<&PiecewiseMatrix> for MatrixRecord {
    fn from(m: &PiecewiseMatrix) -> Self {
        MatrixRecord { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(FunctionRecord::from).collect() }
    }
}

impl MatrixRecord {
    pub fn to_matrix(&self) -> Result<PiecewiseMatrix> {
        let entries = self.entries.iter().map(FunctionRecord::to_function).collect::<Result<_>>()?;
        PiecewiseMatrix::new(self.rows, self.cols, entries)
    }
}

impl From<&Atom> for AtomRecord {
    fn from(a: &Atom) -> Self {
        AtomRecord {
            site: a.site,
            order: a.order,
            plus_re: a.plus.re,
            plus_im: a.plus.im,
            minus_re: a.minus.re,
            minus_im: a.minus.im,
        }
    }
}

impl From<&Distribution> for DistributionRecord {
    fn from(d: &Distribution) -> Self {
        DistributionRecord { regular: d.regular_part().into(), atoms: d.atoms().iter().map(AtomRecord::from).collect() }
    }
}

impl DistributionRecord {
    pub fn to_distribution(&self) -> Result<Distribution> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.site, a.order, Complex::new(a.plus_re, a.plus_im), Complex::new(a.minus_re, a.minus_im)))
            .collect();
        Distribution::new(self.regular.to_function()?, atoms)
    }
}

impl From<&TestFunction> for TestFunctionRecord {
    fn from(t: &TestFunction) -> Self {
        let (u, v) = t.support();
        TestFunctionRecord { body: t.body().into(), support: [u, v] }
    }
}

impl TestFunctionRecord {
    pub fn to_test_function(&self) -> Result<TestFunction> {
        TestFunction::new(self.body.to_function()?, (self.support[0], self.support[1]))
    }
}

/// First-order problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemRecord {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(rename = "A")]
    pub a: Input<MatrixRecord>,
    pub f: Vec<Input<DistributionRecord>>,
    pub t0: f64,
    #[serde(default)]
    pub x0: Option<Vec<ComplexInput>>,
    #[serde(default)]
    pub alpha_ic: Option<ComplexInput>,
    /// Working interval for expression inputs; derived from the sites when absent.
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
}

/// Higher-order problem file: `x^(m) = Σ_j A_j x^(j) + f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HigherOrderRecord {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    pub coeffs: Vec<Input<MatrixRecord>>,
    /// Rows of the forcing matrix.
    pub f: Vec<Vec<Input<DistributionRecord>>>,
    pub t0: f64,
    /// `ics[k]` is the value of the k-th derivative at `t0`, as rows.
    #[serde(default)]
    pub ics: Vec<Vec<Vec<ComplexInput>>>,
    #[serde(default)]
    pub alpha_ic: Option<ComplexInput>,
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
}

fn text_exprs<'a, R: 'a>(inputs: impl IntoIterator<Item = &'a Input<R>>) -> Result<Vec<crate::cli::ast::Expr>> {
    inputs
        .into_iter()
        .filter_map(|i| match i {
            Input::Text(s) => Some(parse(s)),
            Input::Record(_) => None,
        })
        .collect()
}

fn working_interval(given: Option<[f64; 2]>, exprs: &[crate::cli::ast::Expr], t0: f64) -> Result<Interval> {
    match given {
        Some([lo, hi]) => Interval::new(lo, hi),
        None => Ok(default_interval(&exprs.iter().collect::<Vec<_>>(), &[t0])),
    }
}

pub fn matrix_input(i: &Input<MatrixRecord>, iv: Interval) -> Result<PiecewiseMatrix> {
    match i {
        Input::Text(s) => eval(&parse(s)?, iv)?.into_matrix(iv),
        Input::Record(r) => r.to_matrix(),
    }
}

pub fn dist_input(i: &Input<DistributionRecord>, iv: Interval) -> Result<Distribution> {
    match i {
        Input::Text(s) => eval(&parse(s)?, iv)?.into_dist(iv),
        Input::Record(r) => r.to_distribution(),
    }
}

impl ProblemRecord {
    pub fn to_problem(&self) -> Result<CauchyProblem> {
        let mut exprs = text_exprs(std::iter::once(&self.a))?;
        exprs.extend(text_exprs(&self.f)?);
        let iv = working_interval(self.interval, &exprs, self.t0)?;
        let a = matrix_input(&self.a, iv)?;
        let f = self.f.iter().map(|x| dist_input(x, iv)).collect::<Result<Vec<_>>>()?;
        if let Some(n) = self.n {
            if n != f.len() || n != a.rows() {
                return Err(Error::Dimension(format!("n = {n} but A is {}x{} and f has {} entries", a.rows(), a.cols(), f.len())));
            }
        }
        let mut p = CauchyProblem::new(a, f, self.t0);
        if let Some(x0) = &self.x0 {
            p = p.with_x0(x0.iter().map(|c| c.value()).collect());
        }
        if let Some(al) = self.alpha_ic {
            p = p.with_alpha_ic(al.value());
        }
        Ok(p)
    }
}

impl HigherOrderRecord {
    pub fn to_problem(&self) -> Result<HigherOrderProblem> {
        let mut exprs = text_exprs(&self.coeffs)?;
        exprs.extend(text_exprs(self.f.iter().flatten())?);
        let iv = working_interval(self.interval, &exprs, self.t0)?;
        let coeffs = self.coeffs.iter().map(|c| matrix_input(c, iv)).collect::<Result<Vec<_>>>()?;
        if let Some(m) = self.m {
            if m != coeffs.len() {
                return Err(Error::Dimension(format!("m = {m} but {} coefficient matrices given", coeffs.len())));
            }
        }
        let rows = self.f.len();
        let cols = self.f.first().map_or(0, Vec::len);
        if self.f.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("forcing rows have different lengths".into()));
        }
        let entries = self.f.iter().flatten().map(|x| dist_input(x, iv)).collect::<Result<Vec<_>>>()?;
        let f = DistMatrix::new(rows, cols, entries)?;
        let mut p = HigherOrderProblem::new(coeffs, f, self.t0);
        if !self.ics.is_empty() {
            p.ics = self.ics.iter().map(|m| complex_matrix(m)).collect::<Result<_>>()?;
        }
        if let Some(al) = self.alpha_ic {
            p.alpha_ic = al.value();
        }
        if let Some(n) = self.n {
            if n != rows {
                return Err(Error::Dimension(format!("n = {n} but the forcing has {rows} rows")));
            }
        }
        Ok(p)
    }
}

pub fn complex_matrix(rows: &[Vec<ComplexInput>]) -> Result<DMatrix<Complex>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|x| x.len() != c) {
        return Err(Error::Dimension("matrix rows have different lengths".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j].value()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub max_residual: f64,
    pub residuals: Vec<f64>,
    pub derivative_certified: bool,
    pub threshold: f64,
    pub passed: bool,
}

impl From<&ResidualReport> for ResidualRecord {
    fn from(r: &ResidualReport) -> Self {
        ResidualRecord {
            max_residual: r.max_residual,
            residuals: r.residuals.clone(),
            derivative_certified: r.derivative_certified,
            threshold: r.threshold,
            passed: r.passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    /// Rendered expressions for each component of `x`.
    pub x_text: Vec<String>,
    pub x: Vec<DistributionRecord>,
    pub x_prime: Vec<DistributionRecord>,
    pub fundamental: MatrixRecord,
    pub fundamental_inv: MatrixRecord,
    pub y: Vec<DistributionRecord>,
    #[serde(default)]
    pub residual: Option<ResidualRecord>,
}

impl SolutionRecord {
    pub fn new(s: &SolutionBundle, residual: Option<&ResidualReport>) -> Self {
        SolutionRecord {
            x_text: s.x.iter().map(render::distribution).collect(),
            x: s.x.iter().map(DistributionRecord::from).collect(),
            x_prime: s.x_prime.iter().map(DistributionRecord::from).collect(),
            fundamental: (&s.fundamental).into(),
            fundamental_inv: (&s.fundamental_inv).into(),
            y: s.y.iter().map(DistributionRecord::from).collect(),
            residual: residual.map(ResidualRecord::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HigherOrderSolutionRecord {
    pub x_text: Vec<Vec<String>>,
    /// `derivatives[k]` holds the rows of `x^(k)`, `k = 0..=m`.
    pub derivatives: Vec<Vec<Vec<DistributionRecord>>>,
    pub companion: MatrixRecord,
}

fn dist_rows(m: &DistMatrix) -> Vec<Vec<&Distribution>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

impl From<&HigherOrderSolution> for HigherOrderSolutionRecord {
    fn from(s: &HigherOrderSolution) -> Self {
        HigherOrderSolutionRecord {
            x_text: dist_rows(&s.x).into_iter().map(|r| r.into_iter().map(render::distribution).collect()).collect(),
            derivatives: s
                .derivatives
                .iter()
                .map(|m| dist_rows(m).into_iter().map(|r| r.into_iter().map(DistributionRecord::from).collect()).collect())
                .collect(),
            companion: (&s.companion).into(),
        }
    }
}

/// Pretty JSON with sorted keys.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Input(e.to_string()))?;
    serde_json::to_string_pretty(&v).map_err(|e| Error::Input(e.to_string()))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed JSON: {e}")))
}
