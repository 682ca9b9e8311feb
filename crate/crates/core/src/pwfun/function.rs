use crate::error::{Error, Result};
use crate::scalar::{re, Complex, Tolerance};

use super::piece::{Piece, Term};

/// Open working interval `(lo, hi)`; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Domain(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    /// Strict membership in the open interval.
    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point {t} outside working interval ({}, {})",
                self.lo, self.hi
            )))
        }
    }

    /// Hull of `sites` padded by `pad` on both sides; `(-pad, pad)` when empty.
    pub fn hull(sites: impl IntoIterator<Item = f64>, pad: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in sites {
            if s.is_finite() {
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
        if lo > hi {
            lo = 0.0;
            hi = 0.0;
        }
        Interval { lo: lo - pad, hi: hi + pad }
    }
}

/// Which one-sided limit to take at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Element of G∞ restricted to a working interval: finitely many breakpoints,
/// exponential-polynomial pieces in between.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFunction {
    interval: Interval,
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
}

fn canonical_anchor(breakpoints: &[f64], i: usize) -> f64 {
    if i > 0 {
        breakpoints[i - 1]
    } else {
        breakpoints.first().copied().unwrap_or(0.0)
    }
}

fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

impl PiecewiseFunction {
    /// Builds a function from raw parts, re-anchoring every piece and merging
    /// adjacent pieces that coincide.
    pub fn from_parts(interval: Interval, breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Input(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Input("breakpoints must be strictly increasing".into()));
            }
        }
        for &b in &breakpoints {
            interval.check(b)?;
        }
        Ok(Self::assemble(interval, breakpoints, pieces))
    }

    fn assemble(interval: Interval, breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Self {
        let pieces = pieces
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.reanchor(canonical_anchor(&breakpoints, i)))
            .collect();
        let mut f = PiecewiseFunction { interval, breakpoints, pieces };
        f.canonicalize();
        f
    }

    fn canonicalize(&mut self) {
        let tol = Tolerance::default();
        let mut bps: Vec<f64> = Vec::with_capacity(self.breakpoints.len());
        let mut pieces: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        let mut iter = self.pieces.drain(..);
        if let Some(first) = iter.next() {
            pieces.push(first);
        }
        for (b, p) in self.breakpoints.iter().zip(iter) {
            let last = pieces.last().unwrap();
            if last.approx_eq(&p, &tol) {
                continue;
            }
            bps.push(*b);
            pieces.push(p);
        }
        self.pieces = pieces
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.reanchor(canonical_anchor(&bps, i)))
            .collect();
        self.breakpoints = bps;
    }

    pub fn zero(interval: Interval) -> Self {
        Self::constant(interval, re(0.0))
    }

    pub fn constant(interval: Interval, c: Complex) -> Self {
        PiecewiseFunction { interval, breakpoints: vec![], pieces: vec![Piece::constant(0.0, c)] }
    }

    /// Single exponential-polynomial term on the whole interval.
    pub fn exp_poly(interval: Interval, coeff: Complex, power: u32, rate: Complex, anchor: f64) -> Self {
        let p = Piece::new(anchor, vec![Term::new(coeff, power, rate)]);
        Self::assemble(interval, vec![], vec![p])
    }

    /// The identity function `t`.
    pub fn identity(interval: Interval) -> Self {
        Self::exp_poly(interval, re(1.0), 1, re(0.0), 0.0)
    }

    /// Heaviside step θ_τ: 0 left of τ, 1 right of τ.
    pub fn step(interval: Interval, tau: f64) -> Result<Self> {
        interval.check(tau)?;
        Ok(Self::assemble(
            interval,
            vec![tau],
            vec![Piece::zero(tau), Piece::constant(tau, re(1.0))],
        ))
    }

    /// Ramp ζ_τ: 0 left of τ, t - τ right of τ.
    pub fn ramp(interval: Interval, tau: f64) -> Result<Self> {
        interval.check(tau)?;
        Ok(Self::assemble(
            interval,
            vec![tau],
            vec![Piece::zero(tau), Piece::new(tau, vec![Term::new(re(1.0), 1, re(0.0))])],
        ))
    }

    /// Indicator of `(u, v)`; either end may lie outside the interval.
    pub fn indicator(interval: Interval, u: f64, v: f64) -> Result<Self> {
        if u >= v {
            return Err(Error::Domain(format!("empty indicator ({u}, {v})")));
        }
        let mut bps = Vec::new();
        let mut pieces = vec![];
        let inside_u = interval.contains(u);
        let inside_v = interval.contains(v);
        let before = if u <= interval.lo { re(1.0) } else { re(0.0) };
        pieces.push(Piece::constant(0.0, before));
        if inside_u {
            bps.push(u);
            pieces.push(Piece::constant(0.0, re(1.0)));
        }
        if inside_v {
            bps.push(v);
            pieces.push(Piece::constant(0.0, re(0.0)));
        }
        if !inside_u && !inside_v && (u >= interval.hi || v <= interval.lo) {
            return Ok(Self::zero(interval));
        }
        Ok(Self::assemble(interval, bps, pieces))
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Span `(l, r)` of piece `i`.
    pub fn piece_span(&self, i: usize) -> (f64, f64) {
        let l = if i == 0 { self.interval.lo } else { self.breakpoints[i - 1] };
        let r = if i == self.breakpoints.len() { self.interval.hi } else { self.breakpoints[i] };
        (l, r)
    }

    fn piece_index(&self, t: f64, side: Side) -> usize {
        match side {
            Side::Right => self.breakpoints.partition_point(|&b| b <= t),
            Side::Left => self.breakpoints.partition_point(|&b| b < t),
        }
    }

    pub fn same_interval(&self, other: &Self) -> Result<()> {
        if self.interval == other.interval {
            Ok(())
        } else {
            Err(Error::IntervalMismatch(
                self.interval.lo,
                self.interval.hi,
                other.interval.lo,
                other.interval.hi,
            ))
        }
    }

    /// Pieces of `self` over a finer breakpoint list, anchored canonically.
    fn refine(&self, bps: &[f64]) -> Vec<Piece> {
        (0..=bps.len())
            .map(|j| {
                let idx = if j == 0 {
                    0
                } else {
                    self.breakpoints.partition_point(|&b| b <= bps[j - 1])
                };
                self.pieces[idx].reanchor(canonical_anchor(bps, j))
            })
            .collect()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&Piece, &Piece) -> Piece) -> Result<Self> {
        self.same_interval(other)?;
        let bps = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let a = self.refine(&bps);
        let b = other.refine(&bps);
        let pieces = a.iter().zip(&b).map(|(x, y)| op(x, y)).collect();
        Ok(Self::assemble(self.interval, bps, pieces))
    }

    fn map(&self, op: impl Fn(&Piece) -> Piece) -> Self {
        let pieces = self.pieces.iter().map(op).collect();
        Self::assemble(self.interval, self.breakpoints.clone(), pieces)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, Piece::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, Piece::sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, Piece::mul)
    }

    pub fn scale(&self, c: Complex) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn neg(&self) -> Self {
        self.scale(re(-1.0))
    }

    /// Piece active just right (or left) of `t`.
    pub fn piece_at(&self, t: f64, side: Side) -> &Piece {
        &self.pieces[self.piece_index(t, side)]
    }

    /// Value at `t`; at a breakpoint the right limit is returned.
    pub fn eval(&self, t: f64) -> Complex {
        self.pieces[self.piece_index(t, Side::Right)].eval(t)
    }

    /// One-sided limits `[g(t±), g'(t±), ..., g^(max_order)(t±)]`.
    pub fn one_sided_jet(&self, t: f64, side: Side, max_order: usize) -> Result<Vec<Complex>> {
        self.interval.check(t)?;
        Ok(self.pieces[self.piece_index(t, side)].jet(t, max_order))
    }

    /// `g^(order)(t+) - g^(order)(t-)`.
    pub fn jump(&self, t: f64, order: usize) -> Result<Complex> {
        self.interval.check(t)?;
        let l = self.piece_index(t, Side::Left);
        let r = self.piece_index(t, Side::Right);
        if l == r {
            return Ok(re(0.0));
        }
        let right = self.pieces[r].jet(t, order)[order];
        let left = self.pieces[l].jet(t, order)[order];
        Ok(right - left)
    }

    /// Derivative taken piece by piece; breakpoints are kept and no atoms appear.
    pub fn differentiate_ae(&self) -> Self {
        self.map(Piece::derivative)
    }

    /// The continuous function `G(t) = ∫_{t0}^t g(s) ds`.
    pub fn antiderivative(&self, t0: f64) -> Result<Self> {
        self.interval.check(t0)?;
        let raw: Vec<Piece> = self.pieces.iter().map(Piece::antiderivative).collect();
        let n = raw.len();
        let i0 = self.piece_index(t0, Side::Right);
        let mut out: Vec<Option<Piece>> = vec![None; n];
        let start = raw[i0].sub(&Piece::constant(raw[i0].anchor(), raw[i0].eval(t0)));
        out[i0] = Some(start);
        for i in (i0 + 1)..n {
            let b = self.breakpoints[i - 1];
            let prev = out[i - 1].as_ref().unwrap().eval(b);
            let c = prev - raw[i].eval(b);
            out[i] = Some(raw[i].add(&Piece::constant(raw[i].anchor(), c)));
        }
        for i in (0..i0).rev() {
            let b = self.breakpoints[i];
            let next = out[i + 1].as_ref().unwrap().eval(b);
            let c = next - raw[i].eval(b);
            out[i] = Some(raw[i].add(&Piece::constant(raw[i].anchor(), c)));
        }
        let pieces = out.into_iter().map(Option::unwrap).collect();
        Ok(Self::assemble(self.interval, self.breakpoints.clone(), pieces))
    }

    /// Exact `∫_u^v g`, computed piece by piece.
    pub fn definite_integral(&self, u: f64, v: f64) -> Result<Complex> {
        if u > v {
            return Err(Error::Domain(format!("reversed integration bounds ({u}, {v})")));
        }
        if u < self.interval.lo || v > self.interval.hi {
            return Err(Error::Domain(format!(
                "integration bounds ({u}, {v}) leave the working interval"
            )));
        }
        let mut total = re(0.0);
        if u == v {
            return Ok(total);
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            let (l, r) = self.piece_span(i);
            let a = u.max(l);
            let b = v.min(r);
            if a >= b || piece.is_exact_zero() {
                continue;
            }
            total += piece.integral(a, b);
        }
        Ok(total)
    }

    /// Multiplies by the indicator of `(u, v)`.
    pub fn cut(&self, u: f64, v: f64) -> Result<Self> {
        self.mul(&Self::indicator(self.interval, u, v)?)
    }

    pub fn is_zero(&self, tol: &Tolerance) -> bool {
        self.pieces.iter().all(|p| p.is_zero(tol))
    }

    /// Term-wise equality of canonical forms under tolerance.
    pub fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        if self.interval != other.interval {
            return false;
        }
        let bps = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let a = self.refine(&bps);
        let b = other.refine(&bps);
        a.iter().zip(&b).all(|(x, y)| x.approx_eq(y, tol))
    }

    /// True when `g(t) = 0` for every `t < t0` in the interval.
    pub fn vanishes_left_of(&self, t0: f64, tol: &Tolerance) -> bool {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(i, _)| self.piece_span(*i).0 < t0)
            .all(|(_, p)| p.is_zero(tol))
    }

    /// True when every piece is constant.
    pub fn is_piecewise_constant(&self) -> bool {
        self.pieces.iter().all(|p| p.as_constant().is_some())
    }

    /// Breakpoints where the function itself jumps.
    pub fn jump_sites(&self, tol: &Tolerance) -> Vec<(f64, Complex)> {
        self.breakpoints
            .iter()
            .filter_map(|&b| {
                let j = self.jump(b, 0).ok()?;
                (!tol.is_zero(j)).then_some((b, j))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Interval {
        Interval::new(-5.0, 5.0).unwrap()
    }

    fn c(x: f64) -> Complex {
        re(x)
    }

    #[test]
    fn jets_of_step_ramp_and_exponential() {
        let i = line();
        let theta = PiecewiseFunction::step(i, 1.0).unwrap();
        assert_eq!(theta.one_sided_jet(1.0, Side::Right, 2).unwrap(), vec![c(1.0), c(0.0), c(0.0)]);
        assert_eq!(theta.one_sided_jet(1.0, Side::Left, 0).unwrap(), vec![c(0.0)]);

        let zeta = PiecewiseFunction::ramp(i, 1.0).unwrap();
        assert_eq!(zeta.one_sided_jet(1.0, Side::Right, 2).unwrap(), vec![c(0.0), c(1.0), c(0.0)]);

        let e = PiecewiseFunction::exp_poly(i, c(1.0), 0, c(2.0), 1.0)
            .mul(&theta)
            .unwrap();
        let jet = e.one_sided_jet(1.0, Side::Right, 3).unwrap();
        for (k, v) in jet.iter().enumerate() {
            assert!((v - c(2f64.powi(k as i32))).norm() < 1e-13);
        }
    }

    #[test]
    fn jets_outside_interval_fail() {
        let theta = PiecewiseFunction::step(line(), 1.0).unwrap();
        assert!(matches!(theta.one_sided_jet(7.0, Side::Right, 1), Err(Error::Domain(_))));
        assert!(matches!(theta.jump(-5.0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn jumps() {
        let i = line();
        let theta = PiecewiseFunction::step(i, 1.0).unwrap();
        let zeta = PiecewiseFunction::ramp(i, 1.0).unwrap();
        assert_eq!(theta.jump(1.0, 0).unwrap(), c(1.0));
        assert_eq!(zeta.jump(1.0, 1).unwrap(), c(1.0));
        assert_eq!(zeta.jump(1.0, 0).unwrap(), c(0.0));
        assert_eq!(theta.jump(0.5, 0).unwrap(), c(0.0));
    }

    #[test]
    fn algebra() {
        let i = line();
        let tol = Tolerance::default();
        let theta = PiecewiseFunction::step(i, 1.0).unwrap();
        assert!(theta.mul(&theta).unwrap().approx_eq(&theta, &tol));
        let zeta = PiecewiseFunction::ramp(i, 1.0).unwrap();
        let sq = zeta.mul(&zeta).unwrap();
        assert_eq!(sq.breakpoints(), &[1.0]);
        assert!(sq.pieces()[0].is_exact_zero());
        assert_eq!(sq.pieces()[1].terms(), &[Term::new(c(1.0), 2, c(0.0))]);
        let z = theta.add(&theta.scale(c(-1.0))).unwrap();
        assert!(z.is_zero(&tol));
        assert!(z.breakpoints().is_empty());
    }

    #[test]
    fn interval_mismatch() {
        let a = PiecewiseFunction::zero(line());
        let b = PiecewiseFunction::zero(Interval::new(-1.0, 1.0).unwrap());
        assert!(matches!(a.add(&b), Err(Error::IntervalMismatch(..))));
    }

    #[test]
    fn differentiate() {
        let i = line();
        let tol = Tolerance::default();
        let theta = PiecewiseFunction::step(i, 1.0).unwrap();
        assert!(theta.differentiate_ae().is_zero(&tol));
        let zeta = PiecewiseFunction::ramp(i, 1.0).unwrap();
        assert!(zeta.differentiate_ae().approx_eq(&theta, &tol));
        let e = PiecewiseFunction::exp_poly(i, c(1.0), 0, c(2.0), 1.0).mul(&theta).unwrap();
        let de = e.differentiate_ae();
        assert!(de.approx_eq(&e.scale(c(2.0)), &tol));
    }

    #[test]
    fn antiderivatives() {
        let i = line();
        let tol = Tolerance::default();
        let theta = PiecewiseFunction::step(i, 1.0).unwrap();
        let zeta = PiecewiseFunction::ramp(i, 1.0).unwrap();
        assert!(theta.antiderivative(0.0).unwrap().approx_eq(&zeta, &tol));
        let z = PiecewiseFunction::zero(i);
        assert!(z.antiderivative(0.0).unwrap().is_zero(&tol));
        let e = PiecewiseFunction::exp_poly(i, c(1.0), 0, c(1.0), 0.0);
        let expected = e.sub(&PiecewiseFunction::constant(i, c(1.0))).unwrap();
        assert!(e.antiderivative(0.0).unwrap().approx_eq(&expected, &tol));
    }

    #[test]
    fn definite_integrals() {
        let i = line();
        let theta = PiecewiseFunction::step(i, 1.0).unwrap();
        assert!((theta.definite_integral(0.0, 2.0).unwrap() - c(1.0)).norm() < 1e-15);
        assert_eq!(theta.definite_integral(0.7, 0.7).unwrap(), c(0.0));
        let t = PiecewiseFunction::identity(i);
        assert!((t.definite_integral(0.0, 1.0).unwrap() - c(0.5)).norm() < 1e-15);
        assert!(matches!(t.definite_integral(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn indicator_clipping() {
        let i = line();
        let tol = Tolerance::default();
        let all = PiecewiseFunction::indicator(i, -10.0, 10.0).unwrap();
        assert!(all.approx_eq(&PiecewiseFunction::constant(i, c(1.0)), &tol));
        let none = PiecewiseFunction::indicator(i, 6.0, 7.0).unwrap();
        assert!(none.is_zero(&tol));
        let right = PiecewiseFunction::indicator(i, 1.0, 10.0).unwrap();
        assert!(right.approx_eq(&PiecewiseFunction::step(i, 1.0).unwrap(), &tol));
    }

    #[test]
    fn removable_breakpoints_are_dropped() {
        let i = line();
        let f = PiecewiseFunction::from_parts(
            i,
            vec![0.0, 1.0],
            vec![Piece::constant(0.0, c(2.0)), Piece::constant(0.0, c(2.0)), Piece::zero(1.0)],
        )
        .unwrap();
        assert_eq!(f.breakpoints(), &[1.0]);
    }
}
