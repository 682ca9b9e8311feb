mod common;

use proptest::prelude::*;
use rand::Rng;

use regudist::calculus::{derivative, is_derivative_of, multiply, primitive, DerivativeSelection};
use regudist::dist::{restrict, Atom, ClassicalDistribution, Distribution};
use regudist::pwfun::{Interval, PiecewiseFunction};
use regudist::scalar::re;
use regudist::{Complex, Tolerance};

fn tol() -> Tolerance {
    Tolerance::new(1e-9, 1e-9)
}

/// Random function without breakpoints at any atom site.
fn rand_continuous(r: &mut rand::rngs::StdRng, iv: Interval) -> PiecewiseFunction {
    PiecewiseFunction::from_parts(iv, vec![], vec![common::rand_piece(r, 0.0)]).unwrap()
}

fn rand_alpha(r: &mut rand::rngs::StdRng) -> Complex {
    if r.gen_bool(0.7) {
        re([0.0, 0.5, 1.0][r.gen_range(0..3)])
    } else {
        common::rand_complex(r, 1.0)
    }
}

fn classical_eq(a: &ClassicalDistribution, b: &ClassicalDistribution) -> bool {
    a.approx_eq(b, &tol())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn multiplication_is_associative(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let (g, h) = (common::rand_pw(&mut r, iv), common::rand_pw(&mut r, iv));
        let f = common::rand_dist(&mut r, iv, 3, None);
        let lhs = multiply(&g.mul(&h).unwrap(), &f).unwrap();
        let rhs = multiply(&g, &multiply(&h, &f).unwrap()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, &tol()));
    }

    #[test]
    fn operations_are_linear(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let t0 = -2.0;
        let g = common::rand_pw(&mut r, iv);
        let (f1, f2) = (common::rand_dist(&mut r, iv, 3, Some(t0)), common::rand_dist(&mut r, iv, 3, Some(t0)));
        let c = common::rand_complex(&mut r, 2.0);
        let comb = f1.scale(c).add(&f2).unwrap();
        let lin = |op: &dyn Fn(&Distribution) -> Distribution| {
            op(&comb).approx_eq(&op(&f1).scale(c).add(&op(&f2)).unwrap(), &tol())
        };
        prop_assert!(lin(&|f| multiply(&g, f).unwrap()));
        let sel = DerivativeSelection::with_alpha(rand_alpha(&mut r));
        prop_assert!(lin(&|f| derivative(f, &sel).unwrap()));
        prop_assert!(lin(&|f| primitive(f, t0).unwrap()));
    }

    #[test]
    fn primitive_then_derivative(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let t0 = [-2.0, 0.5, 1.0][r.gen_range(0..3)];
        let f = common::rand_dist(&mut r, iv, 3, Some(t0));
        prop_assert!(is_derivative_of(&f, &primitive(&f, t0).unwrap()));
    }

    #[test]
    fn step_survives_derivative_and_primitive(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let tau = r.gen_range(-1.0..4.0);
        let theta = Distribution::regular(PiecewiseFunction::step(iv, tau).unwrap());
        let sel = DerivativeSelection::with_alpha(rand_alpha(&mut r));
        let back = primitive(&derivative(&theta, &sel).unwrap(), -2.0).unwrap();
        prop_assert!(back.approx_eq(&theta, &tol()), "{back:?}");
    }

    #[test]
    fn restricted_derivative_ignores_the_selection(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let f = common::rand_dist(&mut r, iv, 3, None);
        let s1 = DerivativeSelection::with_alpha(rand_alpha(&mut r));
        let mut s2 = DerivativeSelection::with_alpha(rand_alpha(&mut r));
        s2.overrides.push((common::SITES[r.gen_range(0..5)], rand_alpha(&mut r)));
        let d1 = derivative(&f, &s1).unwrap();
        let d2 = derivative(&f, &s2).unwrap();
        prop_assert!(classical_eq(&restrict(&d1), &restrict(&d2)));
    }

    #[test]
    fn continuous_coefficients_commute_with_restriction(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let g = rand_continuous(&mut r, iv);
        let f = common::rand_dist(&mut r, iv, 3, None);
        let lhs = restrict(&multiply(&g, &f).unwrap());
        // classical product: every atom becomes Σ_j (-1)^{k-j} C(k,j) g^{(k-j)}(τ) δ^{(j)}
        let mut atoms = Vec::new();
        for a in restrict(&f).atoms {
            let jet = g.one_sided_jet(a.site, regudist::pwfun::Side::Right, a.order).unwrap();
            for j in 0..=a.order {
                let c = a.weight * regudist::scalar::sign(a.order - j) * regudist::scalar::binomial(a.order, j) * jet[a.order - j];
                atoms.push(Atom::delta(a.site, j, re(1.0), c));
            }
        }
        let reg = g.mul(f.regular_part()).unwrap();
        let rhs = restrict(&Distribution::new(reg, atoms).unwrap());
        prop_assert!(classical_eq(&lhs, &rhs));
    }
}
