use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{re, Complex, Tolerance};

use super::function::{Interval, PiecewiseFunction, Side};

/// Matrix of piecewise functions on a shared working interval.
///
/// `breakpoints` is the merged breakpoint list of all entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMatrix {
    rows: usize,
    cols: usize,
    interval: Interval,
    breakpoints: Vec<f64>,
    entries: Vec<PiecewiseFunction>,
}

impl PiecewiseMatrix {
    /// Row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<PiecewiseFunction>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let interval = entries[0].interval();
        for e in &entries {
            e.same_interval(&entries[0])?;
        }
        let mut bps: Vec<f64> = entries.iter().flat_map(|e| e.breakpoints().iter().copied()).collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        Ok(PiecewiseMatrix { rows, cols, interval, breakpoints: bps, entries })
    }

    pub fn scalar(f: PiecewiseFunction) -> Self {
        Self::new(1, 1, vec![f]).expect("1x1")
    }

    pub fn identity(interval: Interval, n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| PiecewiseFunction::constant(interval, re(if k / n == k % n { 1.0 } else { 0.0 })))
            .collect();
        Self::new(n, n, entries).expect("square")
    }

    /// Constant matrix on the whole interval.
    pub fn from_constant(interval: Interval, m: &DMatrix<Complex>) -> Self {
        let entries = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| PiecewiseFunction::constant(interval, m[(i, j)]))
            .collect();
        Self::new(m.nrows(), m.ncols(), entries).expect("shape")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn entries(&self) -> &[PiecewiseFunction] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &PiecewiseFunction {
        &self.entries[i * self.cols + j]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = PiecewiseFunction::zero(self.interval);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(self.rows, other.cols, entries)
    }

    pub fn mul_vec(&self, v: &[PiecewiseFunction]) -> Result<Vec<PiecewiseFunction>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("{} columns vs vector of {}", self.cols, v.len())));
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = PiecewiseFunction::zero(self.interval);
                for (k, vk) in v.iter().enumerate() {
                    acc = acc.add(&self.get(i, k).mul(vk)?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn differentiate_ae(&self) -> Self {
        let entries = self.entries.iter().map(PiecewiseFunction::differentiate_ae).collect();
        Self::new(self.rows, self.cols, entries).expect("shape")
    }

    /// Value matrix at `t` (right limit at breakpoints).
    pub fn eval(&self, t: f64) -> DMatrix<Complex> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(t))
    }

    /// `order`-th one-sided derivative of every entry at `t`.
    pub fn one_sided(&self, t: f64, side: Side, order: usize) -> Result<DMatrix<Complex>> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).one_sided_jet(t, side, order)?[order];
            }
        }
        Ok(m)
    }

    /// Constant matrices on each piece of the merged breakpoint list, or `None`
    /// when some entry is not piecewise constant.
    pub fn piece_constants(&self) -> Option<Vec<DMatrix<Complex>>> {
        if !self.entries.iter().all(PiecewiseFunction::is_piecewise_constant) {
            return None;
        }
        let n = self.breakpoints.len() + 1;
        Some(
            (0..n)
                .map(|k| {
                    let l = if k == 0 { self.interval.lo } else { self.breakpoints[k - 1] };
                    let r = if k + 1 == n { self.interval.hi } else { self.breakpoints[k] };
                    let probe = match (l.is_finite(), r.is_finite()) {
                        (true, true) => 0.5 * (l + r),
                        (true, false) => l + 1.0,
                        (false, true) => r - 1.0,
                        (false, false) => 0.0,
                    };
                    self.eval(probe)
                })
                .collect(),
        )
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(b, tol))
    }
}
