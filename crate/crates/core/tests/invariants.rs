//! Structural invariants of the three Pfaffian systems.

use std::collections::BTreeMap;

use conformal_eds::exterior::{ExteriorForm, Poly, Rational, Var};
use conformal_eds::pfaffian::{cartan_report, coefficient_vars, polar_matrix, polar_rank, sample_integral_element, Adapted, Analysis};
use conformal_eds::systems::{build_system, SystemId};

fn analysis(id: SystemId) -> Analysis {
    cartan_report(&build_system(id), 1).unwrap()
}

fn as_polys(v: &[Rational]) -> Vec<Poly> {
    v.iter().map(|c| Poly::constant(c.clone())).collect()
}

fn pair_value(f: &ExteriorForm, x1: &[Rational], x2: &[Rational]) -> Poly {
    f.evaluate(&[as_polys(x1), as_polys(x2)]).unwrap()
}

#[test]
fn characters_add_up_for_involutive_systems() {
    for id in SystemId::ALL {
        let r = analysis(id).report;
        assert!(r.involutive, "{id:?}");
        let [s0, s1, s2] = r.characters;
        assert_eq!(s0 + s1 + s2, r.c2, "{id:?}");
        assert_eq!(s1 + 2 * s2, r.dim_v2, "{id:?}");
    }
}

#[test]
fn polar_equations_of_one_spanning_vector_kill_the_other() {
    for id in SystemId::ALL {
        let a = analysis(id);
        for seed in 0..4 {
            let e = sample_integral_element(&a.adapted, &a.two_forms, seed).unwrap().expect("consistent sample");
            let (x1, x2) = e.vectors(&a.adapted);
            let polar = polar_matrix(&a.adapted, &a.two_forms, &as_polys(&x1)).unwrap();
            for row in &polar.rows {
                let v = row.evaluate(&[as_polys(&x2)]).unwrap();
                assert!(v.is_zero(), "{id:?} seed {seed}: {v}");
            }
        }
    }
}

#[test]
fn ranks_are_stable_across_seeds() {
    let first = analysis(SystemId::I2);
    for seed in 2..=6 {
        let again = cartan_report(&build_system(SystemId::I2), seed).unwrap();
        assert_eq!(again.report, first.report, "seed {seed}");
        assert_eq!(polar_rank(&again.polar, 5, seed, 4).unwrap().rank, first.polar_rank.rank);
    }
}

#[test]
fn generators_are_nested() {
    let texts = |id| {
        let s = build_system(id);
        s.generators.iter().map(|(_, f)| s.ambient.render(f)).collect::<Vec<_>>()
    };
    let (i1, i2, i3) = (texts(SystemId::I1), texts(SystemId::I2), texts(SystemId::I3));
    assert!(i1.iter().all(|g| i2.contains(g)));
    assert!(i2.iter().all(|g| i3.contains(g)));
    assert_eq!((i1.len(), i2.len(), i3.len()), (6, 12, 15));
}

// Components of an adapted vector of one system in the adapted basis of
// another, through the common product coframe.
fn transfer(v: &[Rational], from: &Adapted, to: &Adapted) -> Vec<Rational> {
    to.change.vector_to_new(&from.change.vector_to_old(v))
}

#[test]
fn integral_elements_of_i3_are_isothermic_elements_of_i2() {
    let (a2, a3) = (analysis(SystemId::I2), analysis(SystemId::I3));
    let ad = &a2.adapted;
    let vars = coefficient_vars(ad);
    for seed in 0..4 {
        let e = sample_integral_element(&a3.adapted, &a3.two_forms, seed).unwrap().expect("consistent sample");
        let (y1, y2) = e.vectors(&a3.adapted);
        let (x1, x2) = (transfer(&y1, &a3.adapted, ad), transfer(&y2, &a3.adapted, ad));
        for x in [&x1, &x2] {
            assert!(ad.generator_indices().all(|k| x[k] == Rational::from_integer(0.into())));
        }
        for w in &a2.two_forms {
            assert!(pair_value(w, &x1, &x2).is_zero());
        }
        // Coefficients of X1 as a vector of the I2 tableau: a1, a2 on the
        // independence pair, then b1..b9 on the complement.
        let mut point: BTreeMap<Var, Rational> = BTreeMap::new();
        let slots: Vec<usize> = [0, 1].into_iter().chain(ad.complement_indices()).collect();
        for (var, &slot) in vars.iter().zip(&slots) {
            point.insert(var.clone(), x1[slot].clone());
        }
        for b in ["b7", "b8", "b9"] {
            assert!(point[&Var::new(b)] == Rational::from_integer(0.into()), "{b} nonzero");
        }
        let rank = a2.polar.matrix.eval(&point).unwrap().rank();
        assert!(rank < 8, "rank {rank} at an I3 element");
    }
}
