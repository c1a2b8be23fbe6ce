//! Randomised algebraic and numerical invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use conformal_eds::calapso::{check_deformation_order2, seed_exact, t_transform, FrameOptions, Profile};
use conformal_eds::exterior::{Coframe, ExteriorForm, Poly};
use conformal_eds::grid::Mesh;
use conformal_eds::liegroup::{algebra_defect, expm, metric_defect, IndexMap};
use conformal_eds::pfaffian::{closure, two_form_generators};
use conformal_eds::systems::{build_system, SystemId};

const VARS: [&str; 3] = ["x", "y", "z"];

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-6i64..=6, 0u32..3, 0u32..3, 0u32..3), 0..5).prop_map(|terms| {
        terms.into_iter().fold(Poly::zero(), |acc, (c, a, b, d)| {
            let m = [a, b, d].iter().zip(VARS).fold(Poly::int(c), |m, (&e, v)| &m * &Poly::var(v).pow(e));
            &acc + &m
        })
    })
}

const BASIS: [&str; 5] = ["t1", "t2", "t3", "t4", "t5"];

fn coframe() -> Coframe {
    Coframe::closed(&BASIS).unwrap()
}

// A form of the given degree (at most 2) with small polynomial coefficients.
fn form(degree: usize) -> impl Strategy<Value = Vec<(usize, usize, Poly)>> {
    prop::collection::vec((0..5usize, 0..5usize, poly()), 0..4).prop_map(move |mut terms| {
        for t in &mut terms {
            if degree < 2 {
                t.1 = usize::MAX;
            }
            if degree < 1 {
                t.0 = usize::MAX;
            }
        }
        terms
    })
}

fn build(cf: &Coframe, degree: usize, terms: &[(usize, usize, Poly)]) -> ExteriorForm {
    let mut out = ExteriorForm::zero(cf.tag(), degree);
    for (i, j, c) in terms {
        let mut t = cf.scalar(c.clone());
        for &k in [i, j].into_iter().filter(|&&k| k != usize::MAX) {
            t = t.wedge(&cf.basis(k)).unwrap();
        }
        if t.degree() == degree {
            out = out.add(&t).unwrap();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomials_form_a_ring(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn wedge_is_associative(
        da in 0..=2usize, db in 0..=2usize, dc in 0..=2usize,
        a in form(2), b in form(2), c in form(2),
    ) {
        let cf = coframe();
        let (a, b, c) = (build(&cf, da, &a), build(&cf, db, &b), build(&cf, dc, &c));
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn graded_commutativity(a in form(1), b in form(2)) {
        let cf = coframe();
        let (a, b) = (build(&cf, 1, &a), build(&cf, 2, &b));
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
        prop_assert!(a.wedge(&a).unwrap().is_zero());
    }

    #[test]
    fn reduce_mod_is_idempotent(f in form(2), ideal in prop::collection::btree_set(0..5usize, 0..4)) {
        let cf = coframe();
        let f = build(&cf, 2, &f);
        let names: Vec<&str> = ideal.iter().map(|&k| BASIS[k]).collect();
        let once = cf.reduce_mod(&f, &names).unwrap();
        prop_assert_eq!(cf.reduce_mod(&once, &names).unwrap(), once);
    }

    #[test]
    fn exponentials_stay_in_the_group(x in prop::collection::vec(-1.0f64..1.0, 15)) {
        let b = IndexMap::standard().algebra_element(&x);
        prop_assert!(algebra_defect(&b) < 1e-14);
        let a = expm(&b);
        prop_assert!(metric_defect(&a) < 1e-9, "{}", metric_defect(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closure_ignores_generator_order(order in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
        let base = build_system(SystemId::I2);
        let mut shuffled = base.clone();
        shuffled.generators = order.iter().map(|&k| base.generators[k].clone()).collect();
        let forms = |sys: &conformal_eds::pfaffian::PfaffSystem| -> BTreeSet<String> {
            let ad = sys.adapt().unwrap();
            let terms = closure(&ad).unwrap();
            two_form_generators(&terms).iter().map(|w| ad.coframe.render(&w.sign_normalized().1)).collect()
        };
        prop_assert_eq!(forms(&base), forms(&shuffled));
    }

    #[test]
    fn spectral_family_keeps_matched_entries(lambda in -2.0f64..2.0) {
        let f = seed_exact(&Profile::default(), 1.0, Mesh::unit(33));
        let t = t_transform(&f, lambda, &conformal_eds::liegroup::GroupElement::identity(), FrameOptions::default()).unwrap();
        let rep = check_deformation_order2(&t.base, &t.deformed, 1e-7).unwrap();
        prop_assert!(rep.matched_ok, "{}", rep.max_matched_relative);
        let w01 = rep.entry("w01").unwrap().sup;
        prop_assert!((w01 - lambda.abs() / 2.0).abs() < 1e-6, "{}", w01);
    }
}
