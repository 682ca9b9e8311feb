#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use regudist::dist::{Atom, Distribution, TestFunction};
use regudist::pwfun::{Interval, Piece, PiecewiseFunction, Term};
use regudist::scalar::re;
use regudist::Complex;

pub const SITES: [f64; 5] = [-1.0, 0.5, 1.0, 2.0, 3.5];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn interval() -> Interval {
    Interval::new(-3.0, 5.0).unwrap()
}

pub fn rand_complex(r: &mut StdRng, scale: f64) -> Complex {
    if r.gen_bool(0.5) {
        re(r.gen_range(-scale..scale))
    } else {
        Complex::new(r.gen_range(-scale..scale), r.gen_range(-scale..scale))
    }
}

pub fn rand_piece(r: &mut StdRng, anchor: f64) -> Piece {
    let n = r.gen_range(1..=3);
    let terms = (0..n)
        .map(|_| {
            // Rates sit on a quarter grid: the closed-form antiderivative divides by r^{p+1},
            // so nonzero rates near 0 are ill-conditioned.
            let q = |r: &mut StdRng, k: i32| r.gen_range(-k..=k) as f64 / 4.0;
            let rate = if r.gen_bool(0.4) {
                re(0.0)
            } else if r.gen_bool(0.7) {
                re(q(r, 4))
            } else {
                Complex::new(q(r, 2), q(r, 8))
            };
            Term::new(rand_complex(r, 2.0), r.gen_range(0..=2), rate)
        })
        .collect();
    Piece::new(anchor, terms)
}

/// Random piecewise exponential-polynomial with up to three breakpoints, mostly at `SITES`.
pub fn rand_pw(r: &mut StdRng, iv: Interval) -> PiecewiseFunction {
    let k = r.gen_range(0..=3);
    let mut bps: Vec<f64> = (0..k)
        .map(|_| if r.gen_bool(0.7) { SITES[r.gen_range(0..SITES.len())] } else { r.gen_range(-2.5..4.5) })
        .collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let pieces = (0..=bps.len())
        .map(|i| {
            let anchor = if i == 0 { bps.first().copied().unwrap_or(0.0) } else { bps[i - 1] };
            rand_piece(r, anchor)
        })
        .collect();
    PiecewiseFunction::from_parts(iv, bps, pieces).unwrap()
}

/// Random distribution; when `t0` is given the result vanishes left of it.
pub fn rand_dist(r: &mut StdRng, iv: Interval, max_order: usize, t0: Option<f64>) -> Distribution {
    let mut reg = rand_pw(r, iv);
    if let Some(t0) = t0 {
        reg = reg.mul(&PiecewiseFunction::step(iv, t0).unwrap()).unwrap();
    }
    let n = r.gen_range(0..=3);
    let atoms = (0..n)
        .map(|_| {
            let site = loop {
                let s = if r.gen_bool(0.8) { SITES[r.gen_range(0..SITES.len())] } else { r.gen_range(-2.5..4.5) };
                if t0.is_none_or(|t| s >= t) {
                    break s;
                }
            };
            Atom::new(site, r.gen_range(0..=max_order), rand_complex(r, 2.0), rand_complex(r, 2.0))
        })
        .collect();
    Distribution::new(reg, atoms).unwrap()
}

/// Random test function: a random body cut to a random window.
pub fn rand_test_fn(r: &mut StdRng, iv: Interval) -> TestFunction {
    let u = r.gen_range(-2.8..2.0);
    let v = r.gen_range((u + 0.3)..4.8);
    TestFunction::cut(&rand_pw(r, iv), u, v).unwrap()
}

pub fn close(a: Complex, b: Complex, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
}
