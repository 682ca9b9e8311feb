mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

use regudist::calculus::{is_derivative_of_with, multiply};
use regudist::cauchy::{solve_cauchy, solve_higher_order, CauchyProblem, DistMatrix, HigherOrderProblem};
use regudist::dist::{pair, Distribution, TestFunction};
use regudist::mollify::ode_solve_numeric;
use regudist::pwfun::{Interval, Piece, PiecewiseFunction, PiecewiseMatrix};
use regudist::scalar::re;
use regudist::{Complex, Tolerance};

const T0: f64 = -2.0;

fn tol() -> Tolerance {
    Tolerance::new(1e-9, 1e-9)
}

fn rand_breaks(r: &mut StdRng) -> Vec<f64> {
    let mut bps: Vec<f64> = (0..r.gen_range(0..=2)).map(|_| common::SITES[r.gen_range(0..5)]).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    bps
}

fn quarter(r: &mut StdRng, k: i32) -> f64 {
    r.gen_range(-k..=k) as f64 / 4.0
}

/// Constant `P D P⁻¹` with eigenvalues on the quarter grid, so that exponents of the
/// solution and of the forcing either coincide or stay well apart.
fn rand_block(r: &mut StdRng, n: usize, real: bool) -> DMatrix<Complex> {
    let mut ev = || if real || r.gen_bool(0.5) { re(quarter(r, 3)) } else { Complex::new(quarter(r, 2), quarter(r, 4)) };
    let d: Vec<Complex> = (0..n).map(|_| ev()).collect();
    if n == 1 || d.iter().all(|&l| l == d[0]) {
        return DMatrix::identity(n, n) * d[0];
    }
    let p = DMatrix::from_row_slice(2, 2, &[re(1.0), re(quarter(r, 2)), re(quarter(r, 2)), re(1.0)]);
    let inv = p.clone().try_inverse().unwrap();
    p * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) * inv
}

/// Piecewise-constant `n x n` coefficient, `n <= 2`.
fn rand_matrix(r: &mut StdRng, iv: Interval, n: usize, real: bool) -> PiecewiseMatrix {
    let bps = rand_breaks(r);
    let blocks: Vec<DMatrix<Complex>> = (0..=bps.len()).map(|_| rand_block(r, n, real)).collect();
    let entries = (0..n * n)
        .map(|e| {
            let pieces = blocks
                .iter()
                .enumerate()
                .map(|(i, b)| Piece::constant(if i == 0 { bps.first().copied().unwrap_or(0.0) } else { bps[i - 1] }, b[(e / n, e % n)]))
                .collect();
            PiecewiseFunction::from_parts(iv, bps.clone(), pieces).unwrap()
        })
        .collect();
    PiecewiseMatrix::new(n, n, entries).unwrap()
}

/// Largest coefficient of the regular part; round-off left of `t0` is relative to it.
fn coeff_scale(x: &Distribution) -> f64 {
    let pieces = x.regular_part().pieces();
    pieces.iter().flat_map(|p| p.terms()).map(|t| t.coeff.norm()).fold(1.0, f64::max)
}

/// Scalar `a0, a1` whose characteristic roots `λ² = a1 λ + a0` lie on the quarter grid.
fn rand_second_order(r: &mut StdRng, iv: Interval) -> (PiecewiseMatrix, PiecewiseMatrix) {
    let bps = rand_breaks(r);
    let (mut c0, mut c1) = (Vec::new(), Vec::new());
    for i in 0..=bps.len() {
        let anchor = if i == 0 { bps.first().copied().unwrap_or(0.0) } else { bps[i - 1] };
        let (l1, l2) = (quarter(r, 3), quarter(r, 3));
        c0.push(Piece::constant(anchor, re(-l1 * l2)));
        c1.push(Piece::constant(anchor, re(l1 + l2)));
    }
    let m = |ps| PiecewiseMatrix::scalar(PiecewiseFunction::from_parts(iv, bps.clone(), ps).unwrap());
    (m(c0), m(c1))
}

fn rand_x0(r: &mut StdRng, n: usize) -> Vec<Complex> {
    (0..n).map(|_| common::rand_complex(r, 2.0)).collect()
}

fn rand_alpha(r: &mut StdRng) -> Complex {
    re([0.0, 0.5, 1.0][r.gen_range(0..3)])
}

/// Test function supported strictly right of `T0`.
fn right_test_fn(r: &mut StdRng, iv: Interval) -> TestFunction {
    let u = r.gen_range(-1.9..3.0);
    let v = r.gen_range((u + 0.3)..4.8);
    TestFunction::cut(&common::rand_pw(r, iv), u, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn solution_vanishes_left_of_t0(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let n = r.gen_range(1..=2);
        let f = (0..n).map(|_| common::rand_dist(&mut r, iv, 2, Some(T0))).collect();
        let p = CauchyProblem::new(rand_matrix(&mut r, iv, n, false), f, T0)
            .with_x0(rand_x0(&mut r, n))
            .with_alpha_ic(rand_alpha(&mut r));
        let s = solve_cauchy(&p).unwrap();
        let u = r.gen_range(-2.95..-2.4);
        let phi = TestFunction::cut(&common::rand_pw(&mut r, iv), u, r.gen_range((u + 0.1)..-2.05)).unwrap();
        for x in &s.x {
            let v = pair(x, &phi).unwrap();
            prop_assert!(v.norm() <= 1e-11 * coeff_scale(x), "{v}");
        }
        prop_assert!(s.is_certified(&tol()));
    }

    #[test]
    fn solution_is_linear_in_the_forcing(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let n = r.gen_range(1..=2);
        let a = rand_matrix(&mut r, iv, n, false);
        let f1: Vec<_> = (0..n).map(|_| common::rand_dist(&mut r, iv, 2, Some(T0))).collect();
        let f2: Vec<_> = (0..n).map(|_| common::rand_dist(&mut r, iv, 2, Some(T0))).collect();
        let c = common::rand_complex(&mut r, 2.0);
        let comb = f1.iter().zip(&f2).map(|(a, b)| a.scale(c).add(b).unwrap()).collect();
        let x1 = solve_cauchy(&CauchyProblem::new(a.clone(), f1, T0)).unwrap().x;
        let x2 = solve_cauchy(&CauchyProblem::new(a.clone(), f2, T0)).unwrap().x;
        let x = solve_cauchy(&CauchyProblem::new(a, comb, T0)).unwrap().x;
        for i in 0..n {
            let expect = x1[i].scale(c).add(&x2[i]).unwrap();
            prop_assert!(x[i].approx_eq(&expect, &tol()));
        }
    }

    #[test]
    fn second_order_matches_hand_built_companion(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let (a0, a1) = rand_second_order(&mut r, iv);
        let f = common::rand_dist(&mut r, iv, 2, Some(T0));
        let (z0, z1) = (common::rand_complex(&mut r, 2.0), common::rand_complex(&mut r, 2.0));
        let alpha = rand_alpha(&mut r);

        let mut p = HigherOrderProblem::new(vec![a0.clone(), a1.clone()], DistMatrix::scalar(f.clone()), T0);
        p.ics = vec![DMatrix::from_element(1, 1, z0), DMatrix::from_element(1, 1, z1)];
        p.alpha_ic = alpha;
        let s = solve_higher_order(&p).unwrap();

        let zero = PiecewiseFunction::zero(iv);
        let one = PiecewiseFunction::constant(iv, re(1.0));
        let comp = PiecewiseMatrix::new(2, 2, vec![zero, one, a0.get(0, 0).clone(), a1.get(0, 0).clone()]).unwrap();
        let hand = CauchyProblem::new(comp, vec![Distribution::zero(iv), f.clone()], T0)
            .with_x0(vec![z0, z1])
            .with_alpha_ic(alpha);
        let b = solve_cauchy(&hand).unwrap();
        prop_assert!(s.x.get(0, 0).approx_eq(&b.x[0], &tol()));

        let z: Vec<&Distribution> = s.derivatives.iter().map(|d| d.get(0, 0)).collect();
        prop_assert!(is_derivative_of_with(z[1], z[0], &tol()), "{:?}\n{:?}", z[0], z[1]);
        prop_assert!(is_derivative_of_with(z[2], z[1], &tol()));
        // away from t0 the equation holds with the given forcing
        let lhs = z[2]
            .sub(&multiply(a1.get(0, 0), z[1]).unwrap())
            .unwrap()
            .sub(&multiply(a0.get(0, 0), z[0]).unwrap())
            .unwrap()
            .sub(&f)
            .unwrap();
        for _ in 0..3 {
            let phi = right_test_fn(&mut r, iv);
            let scale = pair(&f, &phi).unwrap().norm() + pair(z[2], &phi).unwrap().norm();
            prop_assert!(pair(&lhs, &phi).unwrap().norm() <= 1e-9 * scale.max(1.0));
        }
    }

    #[test]
    fn classical_problems_match_the_integrator(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let n = r.gen_range(1..=2);
        let a = rand_matrix(&mut r, iv, n, true);
        let step = PiecewiseFunction::step(iv, T0).unwrap();
        let g: Vec<PiecewiseFunction> = (0..n).map(|_| common::rand_pw(&mut r, iv).mul(&step).unwrap()).collect();
        let x0 = rand_x0(&mut r, n);
        let f = g.iter().cloned().map(Distribution::regular).collect();
        let s = solve_cauchy(&CauchyProblem::new(a.clone(), f, T0).with_x0(x0.clone())).unwrap();
        prop_assert!(s.x.iter().all(|x| x.atoms().is_empty()));
        let traj = ode_solve_numeric(&a, &g, T0, &x0, 4.9, 1e-11).unwrap();
        for _ in 0..20 {
            let t = r.gen_range(-1.95..4.9);
            let num = traj.eval(t).unwrap();
            for i in 0..n {
                let exact = s.x[i].regular_part().eval(t);
                prop_assert!(common::close(exact, num[i], 1e-8), "t={t} exact {exact} numeric {}", num[i]);
            }
        }
    }
}
