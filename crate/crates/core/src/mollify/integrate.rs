use crate::error::{Error, Result};
use crate::pwfun::{Piece, PiecewiseFunction, PiecewiseMatrix, Side};
use crate::scalar::Complex;

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone)]
struct Step {
    t: f64,
    h: f64,
    rc: [Vec<Complex>; 5],
}

impl Step {
    fn eval(&self, t: f64) -> Vec<Complex> {
        let th = (t - self.t) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rc;
        (0..r1.len())
            .map(|i| r1[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * th1) * th) * th1) * th)
            .collect()
    }
}

/// Dense numerical trajectory on `[start, end]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    start: f64,
    end: f64,
    x0: Vec<Complex>,
    steps: Vec<Step>,
}

impl Trajectory {
    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// State at `t`; `None` outside `[start, end]`.
    pub fn eval(&self, t: f64) -> Option<Vec<Complex>> {
        if t < self.start || t > self.end {
            return None;
        }
        if self.steps.is_empty() || t == self.start {
            return Some(self.x0.clone());
        }
        let idx = self.steps.partition_point(|s| s.t + s.h < t).min(self.steps.len() - 1);
        Some(self.steps[idx].eval(t))
    }
}

/// Right-hand side `A_i x + g_i(t)` frozen to the pieces of one smooth segment.
struct Segment {
    n: usize,
    a: Vec<Piece>,
    g: Vec<Piece>,
}

impl Segment {
    fn new(a: &PiecewiseMatrix, g: &[PiecewiseFunction], left: f64) -> Self {
        let n = a.rows();
        let a = a.entries().iter().map(|e| e.piece_at(left, Side::Right).clone()).collect();
        let g = g.iter().map(|e| e.piece_at(left, Side::Right).clone()).collect();
        Segment { n, a, g }
    }

    fn rhs(&self, t: f64, y: &[Complex]) -> Vec<Complex> {
        (0..self.n)
            .map(|i| {
                let mut acc = self.g[i].eval(t);
                for j in 0..self.n {
                    let aij = &self.a[i * self.n + j];
                    if !aij.is_exact_zero() {
                        acc += aij.eval(t) * y[j];
                    }
                }
                acc
            })
            .collect()
    }
}

fn axpy(y: &[Complex], h: f64, terms: &[(f64, &[Complex])]) -> Vec<Complex> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        if *c != 0.0 {
            for (o, v) in out.iter_mut().zip(k.iter()) {
                *o += *v * (h * c);
            }
        }
    }
    out
}

/// Adaptive Dormand-Prince integration of `x' = A x + g` from `(t0, x0)` to `t_end`,
/// restarted at every breakpoint of `A` and `g`, with dense output.
pub fn ode_solve_numeric(
    a: &PiecewiseMatrix,
    g: &[PiecewiseFunction],
    t0: f64,
    x0: &[Complex],
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    let n = a.rows();
    if !a.is_square() || g.len() != n || x0.len() != n {
        return Err(Error::Dimension(format!(
            "A is {}x{}, g has {} entries, x0 has {}",
            a.rows(),
            a.cols(),
            g.len(),
            x0.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("non-positive tolerance {tol}")));
    }
    if !(t_end >= t0) {
        return Err(Error::Domain(format!("t_end = {t_end} precedes t0 = {t0}")));
    }
    let mut cuts: Vec<f64> = a.breakpoints().to_vec();
    for gi in g {
        gi.same_interval(a.get(0, 0))?;
        cuts.extend_from_slice(gi.breakpoints());
    }
    cuts.retain(|&b| b > t0 && b < t_end);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(t_end);

    let mut traj = Trajectory { start: t0, end: t_end, x0: x0.to_vec(), steps: Vec::new() };
    let mut t = t0;
    let mut y = x0.to_vec();
    let mut total = 0usize;
    for &stop in &cuts {
        if stop <= t {
            continue;
        }
        let seg = Segment::new(a, g, t);
        let len = stop - t;
        let mut h = (0.01 * len).max(1e-12).min(len);
        let mut k1 = seg.rhs(t, &y);
        while t < stop {
            total += 1;
            if total > MAX_STEPS {
                return Err(Error::Integration(format!("step budget exhausted near t = {t}")));
            }
            let last = t + h >= stop;
            if last {
                h = stop - t;
            }
            let k2 = seg.rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = seg.rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = seg.rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = seg.rhs(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = seg.rhs(
                t + h,
                &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = seg.rhs(t + h, &y1);
            let mut err = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
                let sk = tol + tol * y[i].norm().max(y1[i].norm());
                err += (e.norm() / sk).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Integration(format!("non-finite error estimate at t = {t}")));
            }
            if err <= 1.0 {
                let ydiff: Vec<Complex> = (0..n).map(|i| y1[i] - y[i]).collect();
                let bspl: Vec<Complex> = (0..n).map(|i| k1[i] * h - ydiff[i]).collect();
                let rc4 = (0..n).map(|i| ydiff[i] - k7[i] * h - bspl[i]).collect();
                let rc5 = (0..n)
                    .map(|i| (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h)
                    .collect();
                traj.steps.push(Step { t, h, rc: [y.clone(), ydiff, bspl, rc4, rc5] });
                t = if last { stop } else { t + h };
                y = y1;
                k1 = k7;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
            if h < 1e-14 * t.abs().max(1.0) && t < stop {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
        }
    }
    Ok(traj)
}

/// Convenience for scalar problems `x' = a(t) x + g(t)`.
pub fn ode_solve_scalar(a: &PiecewiseFunction, g: &PiecewiseFunction, t0: f64, x0: Complex, t_end: f64, tol: f64) -> Result<Trajectory> {
    ode_solve_numeric(&PiecewiseMatrix::scalar(a.clone()), std::slice::from_ref(g), t0, &[x0], t_end, tol)
}
