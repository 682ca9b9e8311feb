mod common;

use proptest::prelude::*;
use rand::Rng;

use regudist::pwfun::{PiecewiseFunction, Side};
use regudist::scalar::re;
use regudist::Tolerance;

fn point(r: &mut rand::rngs::StdRng) -> f64 {
    if r.gen_bool(0.5) {
        common::SITES[r.gen_range(0..common::SITES.len())]
    } else {
        r.gen_range(-2.5..4.5)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn product_jumps(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let (g, h) = (common::rand_pw(&mut r, iv), common::rand_pw(&mut r, iv));
        let gh = g.mul(&h).unwrap();
        let t = point(&mut r);
        let side = |f: &PiecewiseFunction, s| f.one_sided_jet(t, s, 0).unwrap()[0];
        let want = side(&g, Side::Right) * side(&h, Side::Right) - side(&g, Side::Left) * side(&h, Side::Left);
        let scale = (side(&g, Side::Right) * side(&h, Side::Right)).norm() + (side(&g, Side::Left) * side(&h, Side::Left)).norm();
        prop_assert!((gh.jump(t, 0).unwrap() - want).norm() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn antiderivative_differentiates_back(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let g = common::rand_pw(&mut r, iv);
        let t0 = point(&mut r);
        let back = g.antiderivative(t0).unwrap().differentiate_ae();
        prop_assert!(back.approx_eq(&g, &Tolerance::new(1e-10, 1e-10)), "{g:?} vs {back:?}");
        prop_assert!(g.antiderivative(t0).unwrap().eval(t0).norm() <= 1e-12);
    }

    #[test]
    fn jets_agree_away_from_breakpoints(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let g = common::rand_pw(&mut r, iv);
        let t = loop {
            let t = r.gen_range(-2.9..4.9);
            if !g.breakpoints().contains(&t) {
                break t;
            }
        };
        let (l, rt) = (g.one_sided_jet(t, Side::Left, 3).unwrap(), g.one_sided_jet(t, Side::Right, 3).unwrap());
        for (a, b) in l.iter().zip(&rt) {
            prop_assert!(common::close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn integrals_are_additive(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let g = common::rand_pw(&mut r, iv);
        let mut pts = [r.gen_range(-3.0..5.0), point(&mut r), r.gen_range(-3.0..5.0)];
        pts.sort_by(f64::total_cmp);
        let [u, v, w] = pts;
        let whole = g.definite_integral(u, w).unwrap();
        let parts = g.definite_integral(u, v).unwrap() + g.definite_integral(v, w).unwrap();
        prop_assert!(common::close(whole, parts, 1e-12));
    }

    #[test]
    fn finite_differences_converge_at_first_order(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let iv = common::interval();
        let g = common::rand_pw(&mut r, iv);
        let t = r.gen_range(-2.5..4.5);
        let d = g.one_sided_jet(t, Side::Right, 2).unwrap();
        // stay inside the piece to the right of t
        let room = g.breakpoints().iter().copied().filter(|&b| b > t).fold(5.0 - t, |m, b| m.min(b - t));
        prop_assume!(room > 1e-3);
        let err = |h: f64| ((g.eval(t + h) - g.eval(t)) / h - d[1]).norm();
        let (h1, h2) = (room * 1e-2, room * 1e-3);
        let (e1, e2) = (err(h1), err(h2));
        let bound = 0.5 * d[2].norm() + 1e-6 * (1.0 + d[1].norm());
        prop_assert!(e1 <= h1 * bound * 1.5 + 1e-8, "e1 {e1} bound {}", h1 * bound);
        prop_assert!(e2 <= h2 * bound * 1.5 + 1e-8, "e2 {e2} bound {}", h2 * bound);
    }
}

#[test]
fn canonical_forms_drop_removable_breakpoints() {
    let iv = common::interval();
    let t = PiecewiseFunction::step(iv, 1.0).unwrap();
    let one = PiecewiseFunction::constant(iv, re(1.0));
    let sum = t.add(&one.sub(&t).unwrap()).unwrap();
    assert!(sum.breakpoints().is_empty());
    assert_eq!(sum, one);
}
