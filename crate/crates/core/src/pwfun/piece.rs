//! Exponential-polynomial pieces: finite sums `c (t - anchor)^p e^{r (t - anchor)}`.

use std::cmp::Ordering;

use crate::scalar::{binomial, falling, Complex, Tolerance};

/// Rates whose components are below this are snapped to zero.
const RATE_SNAP: f64 = 1e-13;
/// Rates closer than this (relative to `max(1, |r|)`) are merged.
const RATE_MERGE: f64 = 1e-12;
/// Terms smaller than this fraction of the largest term in a piece are dropped.
const COEFF_DROP: f64 = 1e-15;

/// One term `coeff * s^power * e^{rate * s}` where `s = t - anchor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Complex,
    pub power: u32,
    pub rate: Complex,
}

impl Term {
    pub fn new(coeff: Complex, power: u32, rate: Complex) -> Self {
        Term { coeff, power, rate }
    }

    pub fn constant(coeff: Complex) -> Self {
        Term::new(coeff, 0, Complex::new(0.0, 0.0))
    }

    fn eval_at_offset(&self, s: f64) -> Complex {
        let mut v = self.coeff * (self.rate * s).exp();
        if self.power > 0 {
            v *= s.powi(self.power as i32);
        }
        v
    }
}

fn snap(x: f64) -> f64 {
    if x.abs() < RATE_SNAP {
        0.0
    } else {
        x
    }
}

fn rates_match(a: Complex, b: Complex) -> bool {
    (a - b).norm() <= RATE_MERGE * a.norm().max(b.norm()).max(1.0)
}

fn key_cmp(a: &Term, b: &Term) -> Ordering {
    a.rate
        .re
        .total_cmp(&b.rate.re)
        .then(a.rate.im.total_cmp(&b.rate.im))
        .then(a.power.cmp(&b.power))
}

/// `∫_0^1 v^i e^{z v} dv`: power series for small `|z|`, upward recursion otherwise.
fn unit_moment(i: usize, z: Complex) -> Complex {
    if z.norm() < i as f64 + 2.0 {
        let mut sum = Complex::new(0.0, 0.0);
        let mut zn = Complex::new(1.0, 0.0);
        for n in 0..200 {
            let term = zn / (n + i + 1) as f64;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
            zn *= z / (n + 1) as f64;
        }
        return sum;
    }
    let ez = z.exp();
    let mut m = (ez - 1.0) / z;
    for j in 1..=i {
        m = (ez - j as f64 * m) / z;
    }
    m
}

/// A single exponential-polynomial with its anchor point.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    anchor: f64,
    terms: Vec<Term>,
}

impl Piece {
    /// Builds a piece and brings its terms into normal form.
    pub fn new(anchor: f64, terms: Vec<Term>) -> Self {
        let mut p = Piece { anchor, terms };
        p.canonicalize();
        p
    }

    pub fn zero(anchor: f64) -> Self {
        Piece { anchor, terms: Vec::new() }
    }

    pub fn constant(anchor: f64, c: Complex) -> Self {
        Piece::new(anchor, vec![Term::constant(c)])
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self, tol: &Tolerance) -> bool {
        self.terms.iter().all(|t| tol.is_zero(t.coeff))
    }

    /// `Some(c)` when the piece is a constant (including zero).
    pub fn as_constant(&self) -> Option<Complex> {
        match self.terms.as_slice() {
            [] => Some(Complex::new(0.0, 0.0)),
            [t] if t.power == 0 && t.rate == Complex::new(0.0, 0.0) => Some(t.coeff),
            _ => None,
        }
    }

    /// `Some((c0, c1))` when the piece equals `c0 + c1 (t - anchor)`.
    pub fn as_affine(&self) -> Option<(Complex, Complex)> {
        let zero = Complex::new(0.0, 0.0);
        let mut c0 = zero;
        let mut c1 = zero;
        for t in &self.terms {
            if t.rate != zero {
                return None;
            }
            match t.power {
                0 => c0 += t.coeff,
                1 => c1 += t.coeff,
                _ => return None,
            }
        }
        Some((c0, c1))
    }

    fn canonicalize(&mut self) {
        for t in &mut self.terms {
            t.rate = Complex::new(snap(t.rate.re), snap(t.rate.im));
        }
        self.terms.retain(|t| t.coeff != Complex::new(0.0, 0.0) && t.coeff.is_finite());
        self.terms.sort_by(key_cmp);
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if let Some(m) = merged
                .iter_mut()
                .find(|m| m.power == t.power && rates_match(m.rate, t.rate))
            {
                m.coeff += t.coeff;
            } else {
                merged.push(t);
            }
        }
        let scale = merged.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max);
        merged.retain(|t| t.coeff.norm() > COEFF_DROP * scale && t.coeff.norm() > 0.0);
        self.terms = merged;
    }

    /// Value at `t` (the exponential-polynomial is entire, so any real `t` works).
    pub fn eval(&self, t: f64) -> Complex {
        let s = t - self.anchor;
        self.terms.iter().map(|term| term.eval_at_offset(s)).sum()
    }

    /// Same function expressed around a different anchor.
    pub fn reanchor(&self, anchor: f64) -> Piece {
        if anchor == self.anchor {
            return self.clone();
        }
        let d = anchor - self.anchor;
        let mut out = Vec::new();
        for t in &self.terms {
            let shift = t.coeff * (t.rate * d).exp();
            let p = t.power as usize;
            for j in 0..=p {
                let c = shift * binomial(p, j) * d.powi((p - j) as i32);
                out.push(Term::new(c, j as u32, t.rate));
            }
        }
        Piece::new(anchor, out)
    }

    fn aligned(&self, other: &Piece) -> Piece {
        if other.anchor == self.anchor {
            other.clone()
        } else {
            other.reanchor(self.anchor)
        }
    }

    pub fn add(&self, other: &Piece) -> Piece {
        let o = self.aligned(other);
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&o.terms);
        Piece::new(self.anchor, terms)
    }

    pub fn sub(&self, other: &Piece) -> Piece {
        self.add(&other.scale(Complex::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex) -> Piece {
        Piece::new(
            self.anchor,
            self.terms
                .iter()
                .map(|t| Term::new(t.coeff * c, t.power, t.rate))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Piece) -> Piece {
        let o = self.aligned(other);
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                terms.push(Term::new(a.coeff * b.coeff, a.power + b.power, a.rate + b.rate));
            }
        }
        Piece::new(self.anchor, terms)
    }

    pub fn derivative(&self) -> Piece {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.power > 0 {
                out.push(Term::new(t.coeff * t.power as f64, t.power - 1, t.rate));
            }
            out.push(Term::new(t.coeff * t.rate, t.power, t.rate));
        }
        Piece::new(self.anchor, out)
    }

    /// `[f(t), f'(t), ..., f^(max_order)(t)]`.
    pub fn jet(&self, t: f64, max_order: usize) -> Vec<Complex> {
        let mut out = Vec::with_capacity(max_order + 1);
        let mut cur = self.clone();
        for k in 0..=max_order {
            out.push(cur.eval(t));
            if k < max_order {
                cur = cur.derivative();
            }
        }
        out
    }

    /// Some antiderivative (the constant of integration is not normalized).
    pub fn antiderivative(&self) -> Piece {
        let zero = Complex::new(0.0, 0.0);
        let mut out = Vec::new();
        for t in &self.terms {
            let p = t.power as usize;
            if t.rate == zero {
                out.push(Term::new(t.coeff / (p as f64 + 1.0), t.power + 1, zero));
            } else {
                // int s^p e^{rs} ds = e^{rs} sum_j (-1)^j p!/(p-j)! s^{p-j} / r^{j+1}
                let mut rpow = t.rate;
                for j in 0..=p {
                    let c = t.coeff * crate::scalar::sign(j) * falling(p, j) / rpow;
                    out.push(Term::new(c, (p - j) as u32, t.rate));
                    rpow *= t.rate;
                }
            }
        }
        Piece::new(self.anchor, out)
    }

    /// `∫_a^b` of the piece, stable for rates near zero.
    pub fn integral(&self, a: f64, b: f64) -> Complex {
        let local = self.reanchor(a);
        let h = b - a;
        local
            .terms
            .iter()
            .map(|t| t.coeff * h.powi(t.power as i32 + 1) * unit_moment(t.power as usize, t.rate * h))
            .sum()
    }

    /// Structural equality under tolerance (after aligning anchors).
    pub fn approx_eq(&self, other: &Piece, tol: &Tolerance) -> bool {
        let o = self.aligned(other);
        let mut used = vec![false; o.terms.len()];
        for a in &self.terms {
            match o
                .terms
                .iter()
                .enumerate()
                .find(|(_, b)| b.power == a.power && rates_match(a.rate, b.rate))
            {
                Some((idx, b)) => {
                    used[idx] = true;
                    if !tol.eq(a.coeff, b.coeff) {
                        return false;
                    }
                }
                None => {
                    if !tol.is_zero(a.coeff) {
                        return false;
                    }
                }
            }
        }
        o.terms
            .iter()
            .zip(used)
            .all(|(b, u)| u || tol.is_zero(b.coeff))
    }
}
