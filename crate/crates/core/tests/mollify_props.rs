mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

use regudist::cauchy::{verification_suite, CauchyProblem};
use regudist::dist::Distribution;
use regudist::mollify::{
    convergence_report, families_for, ode_solve_scalar, DeltaFamily, PCDeltaFamily, DEFAULT_EPSILONS, NOISE_FLOOR,
};
use regudist::pwfun::{PiecewiseFunction, PiecewiseMatrix};
use regudist::scalar::{factorial, re, sign};
use regudist::Complex;

/// `Σ |c| ε^p` over all terms: the size of the summands of any value on the support.
fn term_scale(f: &PiecewiseFunction, eps: f64) -> f64 {
    f.pieces().iter().flat_map(|p| p.terms()).map(|t| t.coeff.norm() * eps.powi(t.power as i32)).sum()
}

fn rand_alpha(r: &mut StdRng) -> Complex {
    if r.gen_bool(0.5) {
        re(r.gen_range(0.0..=1.0))
    } else {
        common::rand_complex(r, 1.0)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn kernels_carry_unit_mass_split_by_alpha(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let site = common::SITES[r.gen_range(0..5)];
        let alpha = rand_alpha(&mut r);
        let s = r.gen_range(0..=3);
        let eps = r.gen_range(0.05..0.5);
        let fam = DeltaFamily::new(site, alpha, s);
        let rho = fam.kernel(iv, eps).unwrap();
        prop_assert!((rho.definite_integral(site - eps, site + eps).unwrap() - re(1.0)).norm() <= 1e-12);
        prop_assert!((rho.definite_integral(site, site + eps).unwrap() - alpha).norm() <= 1e-12);
        // moments of ρ^{(k)} against (t - τ)^j, j <= k, up to the round-off of the monomial sums
        for k in 0..=s {
            let d = fam.kernel_derivative(iv, eps, k).unwrap();
            for j in 0..=k {
                let mono = PiecewiseFunction::exp_poly(iv, re(1.0), j as u32, re(0.0), site);
                let m = d.mul(&mono).unwrap().definite_integral(site - eps, site + eps).unwrap();
                let want = if j == k { re(sign(k) * factorial(k)) } else { re(0.0) };
                prop_assert!((m - want).norm() <= 1e-13 * term_scale(&d, eps) * eps.powi(j as i32 + 1), "k={k} j={j} eps={eps} m={m}");
            }
        }
        let pc = PCDeltaFamily::new(site, alpha, vec![]);
        let k = r.gen_range(1..1000);
        let fk = pc.member(iv, k).unwrap();
        prop_assert!((fk.definite_integral(site - 1.0, site + 1.0).unwrap() - re(1.0)).norm() <= 1e-12);
        prop_assert!((fk.definite_integral(site, site + 1.0).unwrap() - alpha).norm() <= 1e-12);
    }

    #[test]
    fn integrator_matches_closed_form(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let a = re(r.gen_range(-1.0..1.0));
        let rate = Complex::new(r.gen_range(-1.0..1.0), r.gen_range(-2.0..2.0));
        prop_assume!((rate - a).norm() > 0.1);
        let c = common::rand_complex(&mut r, 2.0);
        let x0 = common::rand_complex(&mut r, 2.0);
        let t0 = r.gen_range(-2.5..0.0);
        let g = PiecewiseFunction::exp_poly(iv, c, 0, rate, 0.0);
        let traj = ode_solve_scalar(&PiecewiseFunction::constant(iv, a), &g, t0, x0, 4.5, 1e-11).unwrap();
        for _ in 0..10 {
            let t = r.gen_range(t0..4.5);
            let e = |z: Complex, s: f64| (z * s).exp();
            let exact = x0 * e(a, t - t0) + c / (rate - a) * (e(rate, t) - e(rate, t0) * e(a, t - t0));
            let got = traj.eval(t).unwrap()[0];
            prop_assert!(common::close(exact, got, 1e-8), "t={t}: {exact} vs {got}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn mollified_solutions_converge_monotonically(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = regudist::pwfun::Interval::new(-1.0, 4.0).unwrap();
        let site = 1.0;
        let a = PiecewiseFunction::step(iv, site).unwrap().scale(re(r.gen_range(-1.0..1.0)));
        let w = re(r.gen_range(0.5..3.0));
        let f = Distribution::delta(iv, site, r.gen_range(0..=1), re([0.0, 0.5, 1.0][r.gen_range(0..3)]), w).unwrap();
        let p = CauchyProblem::new(PiecewiseMatrix::scalar(a), vec![f], 0.0);
        let suite = verification_suite(iv, &[site], 6).unwrap();
        let rep = convergence_report(&p, &families_for(&p, &DEFAULT_EPSILONS).unwrap(), &suite).unwrap();
        prop_assert!(rep.is_monotone(NOISE_FLOOR, 1, 1), "{}", rep.to_table());
        // first-order convergence: the last errors are small against the pairings themselves
        let last = *rep.epsilons.last().unwrap();
        let scale = rep.rows.iter().map(|row| row.symbolic.norm()).fold(1.0, f64::max);
        let worst = rep.rows.iter().filter(|row| row.eps == last).map(|row| row.abs_error).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-2 * scale, "{}", rep.to_table());
    }
}
