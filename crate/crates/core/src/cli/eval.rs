//! Evaluation of expressions into functions, distributions and matrices.

use crate::calculus::multiply;
use crate::dist::{Atom, Distribution};
use crate::error::{Error, Result};
use crate::pwfun::{Interval, Piece, PiecewiseFunction, PiecewiseMatrix, Term};
use crate::scalar::{re, Complex};

use super::ast::Expr;

/// Split used by `delta(τ)` when no `alpha=` is written.
pub const LITERAL_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(Complex),
    Function(PiecewiseFunction),
    Dist(Distribution),
    /// Row-major entries; never nested.
    Matrix { rows: usize, cols: usize, entries: Vec<Value> },
}

impl Value {
    fn kind_name(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "number",
            Value::Function(_) => "function",
            Value::Dist(_) => "distribution",
            Value::Matrix { .. } => "matrix",
        }
    }

    pub fn into_function(self, interval: Interval) -> Result<PiecewiseFunction> {
        match self {
            Value::Scalar(c) => Ok(PiecewiseFunction::constant(interval, c)),
            Value::Function(f) => Ok(f),
            Value::Dist(d) if d.is_regular() => Ok(d.regular_part().clone()),
            v => Err(Error::Type(format!("expected a function, found a {}", v.kind_name()))),
        }
    }

    pub fn into_dist(self, interval: Interval) -> Result<Distribution> {
        match self {
            Value::Dist(d) => Ok(d),
            Value::Matrix { .. } => Err(Error::Type("expected a distribution, found a matrix".into())),
            v => Ok(Distribution::regular(v.into_function(interval)?)),
        }
    }

    pub fn into_scalar(self) -> Result<Complex> {
        match self {
            Value::Scalar(c) => Ok(c),
            Value::Function(f) if f.breakpoints().is_empty() && f.pieces()[0].as_constant().is_some() => {
                Ok(f.pieces()[0].as_constant().unwrap())
            }
            v => Err(Error::Type(format!("expected a number, found a {}", v.kind_name()))),
        }
    }

    /// Entries of a matrix or a single value, with its shape.
    pub fn into_entries(self) -> (usize, usize, Vec<Value>) {
        match self {
            Value::Matrix { rows, cols, entries } => (rows, cols, entries),
            v => (1, 1, vec![v]),
        }
    }

    pub fn into_matrix(self, interval: Interval) -> Result<PiecewiseMatrix> {
        let (rows, cols, entries) = self.into_entries();
        let fs = entries.into_iter().map(|v| v.into_function(interval)).collect::<Result<_>>()?;
        PiecewiseMatrix::new(rows, cols, fs)
    }

    /// Entries of a vector written as a row or a column.
    pub fn into_vector(self) -> Result<Vec<Value>> {
        let (rows, cols, entries) = self.into_entries();
        if rows != 1 && cols != 1 {
            return Err(Error::Dimension(format!("expected a vector, found a {rows}x{cols} matrix")));
        }
        Ok(entries)
    }
}

pub fn eval(e: &Expr, interval: Interval) -> Result<Value> {
    e.kind()?;
    Evaluator { interval }.eval(e)
}

struct Evaluator {
    interval: Interval,
}

impl Evaluator {
    fn eval(&self, e: &Expr) -> Result<Value> {
        let iv = self.interval;
        match e {
            Expr::Num(c) => Ok(Value::Scalar(*c)),
            Expr::T => Ok(Value::Function(PiecewiseFunction::identity(iv))),
            Expr::Theta(s) => Ok(Value::Function(PiecewiseFunction::step(iv, *s)?)),
            Expr::Ramp(s) => Ok(Value::Function(PiecewiseFunction::ramp(iv, *s)?)),
            Expr::Delta { site, alpha, order } => {
                let a = alpha.unwrap_or(re(LITERAL_ALPHA));
                Ok(Value::Dist(Distribution::delta(iv, *site, *order, a, re(1.0))?))
            }
            Expr::DeltaPlus { site, order } => Ok(Value::Dist(Distribution::delta_plus(iv, *site, *order)?)),
            Expr::DeltaMinus { site, order } => Ok(Value::Dist(Distribution::delta_minus(iv, *site, *order)?)),
            Expr::Jump { site, order } => {
                Ok(Value::Dist(Distribution::atom(iv, Atom::jump(*site, *order, re(1.0)))?))
            }
            Expr::Exp(x) => self.exp(self.eval(x)?),
            Expr::Pow(x, n) => self.pow(self.eval(x)?, *n),
            Expr::Neg(x) => self.scale(self.eval(x)?, re(-1.0)),
            Expr::Add(a, b) => self.add(self.eval(a)?, self.eval(b)?),
            Expr::Sub(a, b) => {
                let nb = self.scale(self.eval(b)?, re(-1.0))?;
                self.add(self.eval(a)?, nb)
            }
            Expr::Mul(a, b) => self.mul(self.eval(a)?, self.eval(b)?),
            Expr::Matrix(rows) => {
                let cols = rows[0].len();
                let mut entries = Vec::with_capacity(rows.len() * cols);
                for x in rows.iter().flatten() {
                    match self.eval(x)? {
                        Value::Matrix { .. } => return Err(Error::Type("nested matrices are not supported".into())),
                        v => entries.push(v),
                    }
                }
                Ok(Value::Matrix { rows: rows.len(), cols, entries })
            }
        }
    }

    fn scale(&self, v: Value, c: Complex) -> Result<Value> {
        Ok(match v {
            Value::Scalar(x) => Value::Scalar(x * c),
            Value::Function(f) => Value::Function(f.scale(c)),
            Value::Dist(d) => Value::Dist(d.scale(c)),
            Value::Matrix { rows, cols, entries } => Value::Matrix {
                rows,
                cols,
                entries: entries.into_iter().map(|x| self.scale(x, c)).collect::<Result<_>>()?,
            },
        })
    }

    fn add(&self, a: Value, b: Value) -> Result<Value> {
        let iv = self.interval;
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
            (Value::Matrix { rows, cols, entries }, Value::Matrix { rows: r2, cols: c2, entries: e2 }) => {
                if (rows, cols) != (r2, c2) {
                    return Err(Error::Dimension(format!("cannot add {rows}x{cols} and {r2}x{c2} matrices")));
                }
                let entries = entries.into_iter().zip(e2).map(|(x, y)| self.add(x, y)).collect::<Result<_>>()?;
                Ok(Value::Matrix { rows, cols, entries })
            }
            (Value::Matrix { .. }, _) | (_, Value::Matrix { .. }) => {
                Err(Error::Type("cannot add a matrix and a non-matrix".into()))
            }
            (a @ Value::Dist(_), b) | (a, b @ Value::Dist(_)) => {
                Ok(Value::Dist(a.into_dist(iv)?.add(&b.into_dist(iv)?)?))
            }
            (a, b) => Ok(Value::Function(a.into_function(iv)?.add(&b.into_function(iv)?)?)),
        }
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value> {
        let iv = self.interval;
        match (a, b) {
            (Value::Scalar(c), v) | (v, Value::Scalar(c)) => self.scale(v, c),
            (Value::Matrix { rows, cols, entries }, v) | (v, Value::Matrix { rows, cols, entries }) => {
                if matches!(v, Value::Matrix { .. }) {
                    return Err(Error::Unsupported("matrix products in expressions".into()));
                }
                let entries = entries.into_iter().map(|x| self.mul(x, v.clone())).collect::<Result<_>>()?;
                Ok(Value::Matrix { rows, cols, entries })
            }
            (Value::Dist(_), Value::Dist(_)) => Err(Error::Type("product of two distributions".into())),
            (Value::Dist(d), g) | (g, Value::Dist(d)) => Ok(Value::Dist(multiply(&g.into_function(iv)?, &d)?)),
            (a, b) => Ok(Value::Function(a.into_function(iv)?.mul(&b.into_function(iv)?)?)),
        }
    }

    fn pow(&self, v: Value, n: u32) -> Result<Value> {
        match v {
            Value::Scalar(c) => Ok(Value::Scalar(c.powu(n))),
            Value::Function(f) => {
                let mut out = PiecewiseFunction::constant(self.interval, re(1.0));
                for _ in 0..n {
                    out = out.mul(&f)?;
                }
                Ok(Value::Function(out))
            }
            v => Err(Error::Type(format!("cannot raise a {} to a power", v.kind_name()))),
        }
    }

    /// `exp` of a function that is affine on every piece.
    fn exp(&self, v: Value) -> Result<Value> {
        match v {
            Value::Scalar(c) => Ok(Value::Scalar(c.exp())),
            Value::Function(f) => {
                let mut pieces = Vec::with_capacity(f.pieces().len());
                for p in f.pieces() {
                    let Some((c0, c1)) = p.as_affine() else {
                        return Err(Error::Unsupported(
                            "exp of a function that is not affine on each piece leaves the coefficient class".into(),
                        ));
                    };
                    pieces.push(Piece::new(p.anchor(), vec![Term::new(c0.exp(), 0, c1)]));
                }
                Ok(Value::Function(PiecewiseFunction::from_parts(f.interval(), f.breakpoints().to_vec(), pieces)?))
            }
            v => Err(Error::Type(format!("cannot take exp of a {}", v.kind_name()))),
        }
    }
}

/// Hull of every site and `extra` point, padded by 1; `(-1, 1)` when there are none.
pub fn default_interval(exprs: &[&Expr], extra: &[f64]) -> Interval {
    let mut sites: Vec<f64> = exprs.iter().flat_map(|e| e.sites()).collect();
    sites.extend_from_slice(extra);
    if sites.is_empty() {
        sites.push(0.0);
    }
    Interval::hull(sites, 1.0)
}
