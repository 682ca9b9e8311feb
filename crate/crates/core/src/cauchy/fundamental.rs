use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pwfun::{Piece, PiecewiseFunction, PiecewiseMatrix, Term};
use crate::scalar::{re, Complex};

/// Eigenvalues closer than this (relative to the matrix scale) are treated as equal.
const CLUSTER: f64 = 1e-6;
/// Largest accepted Cayley-Hamilton residual, relative to the matrix scale.
const CH_RESIDUAL: f64 = 1e-8;

fn eigenvalues(m: &DMatrix<Complex>) -> Result<Vec<Complex>> {
    let n = m.nrows();
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Unsupported("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Replaces eigenvalues that agree up to `CLUSTER * scale` by their cluster mean,
/// grouping members of a cluster next to each other.
fn cluster(ev: Vec<Complex>, scale: f64) -> Vec<Complex> {
    let mut groups: Vec<Vec<Complex>> = Vec::new();
    for l in ev {
        match groups.iter_mut().find(|g| {
            let mean: Complex = g.iter().sum::<Complex>() / g.len() as f64;
            (mean - l).norm() <= CLUSTER * scale
        }) {
            Some(g) => g.push(l),
            None => groups.push(vec![l]),
        }
    }
    let mut out = Vec::new();
    for g in groups {
        let mut mean: Complex = g.iter().sum::<Complex>() / g.len() as f64;
        if mean.im.abs() <= CLUSTER * scale * 1e-3 {
            mean.im = 0.0;
        }
        if mean.re.abs() <= CLUSTER * scale * 1e-3 {
            mean.re = 0.0;
        }
        out.extend(std::iter::repeat_n(mean, g.len()));
    }
    out
}

/// Entries of `exp(M s)` as exponential-polynomials in `s` (anchor 0), row-major.
///
/// Putzer's construction: `exp(M s) = Σ_k r_{k+1}(s) P_k` with
/// `P_k = Π_{j<=k} (M - λ_j I)` and `r_k' = λ_k r_k + r_{k-1}`.
pub fn expm_pieces(m: &DMatrix<Complex>) -> Result<Vec<Piece>> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::Dimension(format!("matrix exponential of a {}x{} matrix", n, m.ncols())));
    }
    let scale = m.norm().max(1.0);
    let lambda = cluster(eigenvalues(m)?, scale);
    let exp_piece = |rate: Complex| Piece::new(0.0, vec![Term::new(re(1.0), 0, rate)]);

    let mut r = vec![exp_piece(lambda[0])];
    for k in 1..n {
        let shifted = r[k - 1].mul(&exp_piece(-lambda[k]));
        let anti = shifted.antiderivative();
        let anti = anti.sub(&Piece::constant(0.0, anti.eval(0.0)));
        r.push(anti.mul(&exp_piece(lambda[k])));
    }

    let id = DMatrix::<Complex>::identity(n, n);
    let mut p = vec![id.clone()];
    for k in 1..=n {
        let next = &p[k - 1] * (m - id.scale(1.0) * lambda[k - 1]);
        p.push(next);
    }
    let residual = p[n].norm();
    let bound = CH_RESIDUAL * (scale + lambda.iter().map(|l| l.norm()).fold(0.0, f64::max)).powi(n as i32);
    if !residual.is_finite() || residual > bound {
        return Err(Error::Unsupported(format!(
            "eigenvalue computation unreliable: Cayley-Hamilton residual {residual:.3e} exceeds {bound:.3e}"
        )));
    }

    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Piece::zero(0.0);
            for k in 0..n {
                acc = acc.add(&r[k].scale(p[k][(i, j)]));
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// `exp(M)` evaluated numerically through [`expm_pieces`].
pub fn expm(m: &DMatrix<Complex>) -> Result<DMatrix<Complex>> {
    let n = m.nrows();
    let pieces = expm_pieces(m)?;
    Ok(DMatrix::from_fn(n, n, |i, j| pieces[i * n + j].eval(1.0)))
}

/// Piecewise `X` with entries `Σ_l exp(M (t - s))_{il} c_{lj}` on one span.
fn propagate(exp: &[Piece], anchor: f64, c: &DMatrix<Complex>) -> Vec<Piece> {
    let n = c.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Piece::zero(anchor);
            for l in 0..n {
                let e = Piece::new(anchor, exp[i * n + l].terms().to_vec());
                acc = acc.add(&e.scale(c[(l, j)]));
            }
            out.push(acc);
        }
    }
    out
}

fn assemble(a: &PiecewiseMatrix, pieces: Vec<Vec<Piece>>) -> Result<PiecewiseMatrix> {
    let n = a.rows();
    let bps = a.breakpoints().to_vec();
    let entries = (0..n * n)
        .map(|e| {
            let ps = pieces.iter().map(|p| p[e].clone()).collect();
            PiecewiseFunction::from_parts(a.interval(), bps.clone(), ps)
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseMatrix::new(n, n, entries)
}

/// Fundamental matrix `X` of `x' = A x` with `X(t0) = I`, together with `X⁻¹`.
///
/// Only piecewise-constant `A` is supported: on each piece
/// `X(t) = exp(A_i (t - s_i)) X(s_i)` and `X⁻¹(t) = X(s_i)⁻¹ exp(-A_i (t - s_i))`.
pub fn fundamental_pair(a: &PiecewiseMatrix, t0: f64) -> Result<(PiecewiseMatrix, PiecewiseMatrix)> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("coefficient matrix is {}x{}", a.rows(), a.cols())));
    }
    a.interval().check(t0)?;
    let consts = a.piece_constants().ok_or_else(|| {
        Error::Unsupported("fundamental matrix requires a piecewise-constant coefficient".into())
    })?;
    let n = a.rows();
    let bps = a.breakpoints();
    let k = consts.len();
    let i0 = bps.partition_point(|&b| b <= t0);

    let mut fwd: Vec<Vec<Piece>> = Vec::with_capacity(k);
    let mut inv: Vec<Vec<Piece>> = Vec::with_capacity(k);
    let mut start: Vec<Option<(f64, DMatrix<Complex>)>> = vec![None; k];
    start[i0] = Some((t0, DMatrix::identity(n, n)));
    let mut exps = Vec::with_capacity(k);
    let mut neg_exps = Vec::with_capacity(k);
    for c in &consts {
        exps.push(expm_pieces(c)?);
        neg_exps.push(expm_pieces(&(-c))?);
    }
    let value_at = |i: usize, s: f64, x: &DMatrix<Complex>, t: f64| -> DMatrix<Complex> {
        let e = &exps[i];
        let m = DMatrix::from_fn(n, n, |r, c| e[r * n + c].eval(t - s));
        m * x
    };
    for i in (i0 + 1)..k {
        let (s, x) = start[i - 1].clone().unwrap();
        let b = bps[i - 1];
        start[i] = Some((b, value_at(i - 1, s, &x, b)));
    }
    for i in (0..i0).rev() {
        let (s, x) = start[i + 1].clone().unwrap();
        let b = bps[i];
        start[i] = Some((b, value_at(i + 1, s, &x, b)));
    }
    for i in 0..k {
        let (s, x) = start[i].clone().unwrap();
        fwd.push(propagate(&exps[i], s, &x));
        let xinv = x.clone().try_inverse().ok_or_else(|| {
            Error::Unsupported(format!("fundamental matrix is numerically singular at {s}"))
        })?;
        // X⁻¹(t) = X(s)⁻¹ exp(-A (t - s))
        let mut ps = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Piece::zero(s);
                for l in 0..n {
                    let e = Piece::new(s, neg_exps[i][l * n + c].terms().to_vec());
                    acc = acc.add(&e.scale(xinv[(r, l)]));
                }
                ps.push(acc);
            }
        }
        inv.push(ps);
    }
    Ok((assemble(a, fwd)?, assemble(a, inv)?))
}

/// Fundamental matrix `X` of `x' = A x` with `X(t0) = I`.
pub fn fundamental_matrix(a: &PiecewiseMatrix, t0: f64) -> Result<PiecewiseMatrix> {
    Ok(fundamental_pair(a, t0)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pwfun::Interval;
    use crate::scalar::Tolerance;

    fn iv() -> Interval {
        Interval::new(-2.0, 4.0).unwrap()
    }

    #[test]
    fn scalar_constant() {
        let i = iv();
        let a = PiecewiseMatrix::scalar(PiecewiseFunction::constant(i, re(1.5)));
        let x = fundamental_matrix(&a, 0.5).unwrap();
        let want = PiecewiseFunction::exp_poly(i, re(1.0), 0, re(1.5), 0.5);
        assert!(x.get(0, 0).approx_eq(&want, &Tolerance::default()));
    }

    #[test]
    fn scalar_step_coefficient() {
        let i = iv();
        let a = PiecewiseMatrix::scalar(PiecewiseFunction::step(i, 1.0).unwrap().scale(re(2.0)));
        let x = fundamental_matrix(&a, 0.0).unwrap();
        for &t in &[-1.5f64, 0.0, 0.9, 1.0, 1.7, 3.2] {
            let want = if t > 1.0 { (2.0 * (t - 1.0)).exp() } else { 1.0 };
            assert!((x.get(0, 0).eval(t) - re(want)).norm() < 1e-12 * want.max(1.0));
        }
        assert_eq!(x.get(0, 0).breakpoints(), &[1.0]);
    }

    #[test]
    fn nilpotent() {
        let i = iv();
        let m = DMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
        let a = PiecewiseMatrix::from_constant(i, &m);
        let x = fundamental_matrix(&a, 0.25).unwrap();
        let tol = Tolerance::default();
        assert!(x.get(0, 0).approx_eq(&PiecewiseFunction::constant(i, re(1.0)), &tol));
        assert!(x.get(1, 1).approx_eq(&PiecewiseFunction::constant(i, re(1.0)), &tol));
        assert!(x.get(1, 0).is_zero(&tol));
        let want = PiecewiseFunction::identity(i).sub(&PiecewiseFunction::constant(i, re(0.25))).unwrap();
        assert!(x.get(0, 1).approx_eq(&want, &tol));
    }

    #[test]
    fn rotation_and_inverse() {
        let i = iv();
        let m = DMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(-1.0), re(0.0)]);
        let theta = PiecewiseFunction::step(i, 1.0).unwrap();
        let entries = (0..4).map(|k| theta.scale(m[(k / 2, k % 2)]).add(&PiecewiseFunction::constant(i, re(if k == 0 { 0.5 } else { 0.0 }))).unwrap()).collect();
        let a = PiecewiseMatrix::new(2, 2, entries).unwrap();
        let (x, xi) = fundamental_pair(&a, 0.0).unwrap();
        let prod = x.mul(&xi).unwrap();
        assert!(prod.approx_eq(&PiecewiseMatrix::identity(i, 2), &Tolerance::new(1e-9, 1e-11)));
        // X' = A X away from breakpoints
        let dx = x.differentiate_ae();
        let ax = a.mul(&x).unwrap();
        for &t in &[-1.0, 0.3, 1.5, 3.0] {
            let d = dx.eval(t) - ax.eval(t);
            assert!(d.norm() < 1e-10);
        }
        // continuity at the breakpoint
        let l = x.one_sided(1.0, crate::pwfun::Side::Left, 0).unwrap();
        let r = x.one_sided(1.0, crate::pwfun::Side::Right, 0).unwrap();
        assert!((l - r).norm() < 1e-12);
    }

    #[test]
    fn expm_matches_series() {
        let m = DMatrix::from_row_slice(3, 3, &[
            re(0.1), re(0.4), re(-0.2),
            re(-0.3), re(0.2), re(0.5),
            Complex::new(0.0, 0.3), re(0.1), re(-0.4),
        ]);
        let got = expm(&m).unwrap();
        let mut term = DMatrix::<Complex>::identity(3, 3);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &m / re(k as f64);
            sum += &term;
        }
        assert!((got - sum).norm() < 1e-12);
    }

    #[test]
    fn expm_defective_block() {
        let m = DMatrix::from_row_slice(3, 3, &[
            re(2.0), re(1.0), re(0.0),
            re(0.0), re(2.0), re(1.0),
            re(0.0), re(0.0), re(2.0),
        ]);
        let got = expm(&m).unwrap();
        let e2 = 2f64.exp();
        let want = DMatrix::from_row_slice(3, 3, &[
            re(e2), re(e2), re(e2 / 2.0),
            re(0.0), re(e2), re(e2),
            re(0.0), re(0.0), re(e2),
        ]);
        assert!((got - want).norm() < 1e-9);
    }
}
