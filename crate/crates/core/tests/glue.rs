use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symcat_core::basecech::{phase_cocycle_for_class, CechCocycle, Cover, IntegralCohomClass, SimplicialComplex};
use symcat_core::glue::{
    build_glued, extract_twisted_special, fibre_eval, glued_symmetry, isomorphic, norm_function, tensor_glued,
    GluedCategory, GluingDatum,
};
use symcat_core::groups::GroupSpec;

fn moore_datum(k: i64) -> GluingDatum {
    let cover = Cover::star(SimplicialComplex::moore_space(3));
    let class = IntegralCohomClass {
        free_coordinates: vec![],
        torsion_coordinates: vec![k],
        torsion_orders: vec![3],
    };
    let phases = phase_cocycle_for_class(&cover, &class).unwrap();
    GluingDatum::scalar_phases(GroupSpec::special_unitary(2), &phases).unwrap()
}

fn category(k: i64) -> GluedCategory {
    build_glued(&moore_datum(k), 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn interchange_law(seed in any::<u64>(), k in 0i64..3) {
        let cat = category(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = cat.random_arrow(1, 1, &mut rng).unwrap();
        let b = cat.random_arrow(1, 1, &mut rng).unwrap();
        let c = cat.random_arrow(2, 2, &mut rng).unwrap();
        let d = cat.random_arrow(0, 2, &mut rng).unwrap();
        let lhs = tensor_glued(&a.compose(&b).unwrap(), &c.compose(&d).unwrap()).unwrap();
        let rhs = tensor_glued(&a, &c).unwrap().compose(&tensor_glued(&b, &d).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs) <= 1e-9);
    }

    #[test]
    fn random_arrows_are_compatible_with_constant_norms(seed in any::<u64>(), k in 0i64..3) {
        let cat = category(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (r, s) in [(1, 1), (2, 2), (0, 2), (2, 0)] {
            let t = cat.random_arrow(r, s, &mut rng).unwrap();
            prop_assert!(t.compatibility_residual(cat.datum()) <= 1e-9);
            let n = norm_function(&t);
            for v in &n.values {
                prop_assert!((v - n.sup).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn fibre_evaluation_respects_composition(seed in any::<u64>(), x in 0usize..13) {
        let cat = category(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = cat.random_arrow(2, 2, &mut rng).unwrap();
        let b = cat.random_arrow(2, 2, &mut rng).unwrap();
        let ab = a.compose(&b).unwrap();
        let direct = fibre_eval(&a, x) * fibre_eval(&b, x);
        prop_assert!(fibre_eval(&ab, x).distance(&direct) <= 1e-12);
    }
}

#[test]
fn symmetry_is_unitary_and_compatible() {
    let datum = moore_datum(2);
    for (r, s) in [(1, 1), (1, 2), (2, 1)] {
        let eps = glued_symmetry(r, s, &datum);
        assert!(eps.compatibility_residual(&datum) <= 1e-9);
        for v in norm_function(&eps).values {
            assert!((v - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn closure_residuals_are_small() {
    for k in 0..3 {
        let res = category(k).closure_residuals().unwrap();
        for r in [res.composition, res.adjoint, res.tensor, res.compatibility, res.locality] {
            assert!(r <= 1e-9, "{res:?}");
        }
    }
}

#[test]
fn class_zero_phases_match_the_trivial_datum() {
    let cover = Cover::star(SimplicialComplex::octahedron());
    let su2 = GroupSpec::special_unitary(2);
    let a: Vec<Rational64> = (0..6).map(|i| Rational64::new(i, 7)).collect();
    let phases = CechCocycle::phase_coboundary(cover.clone(), &a);
    let datum = GluingDatum::scalar_phases(su2.clone(), &phases).unwrap();
    let w = isomorphic(&GluingDatum::trivial(cover, su2), &datum, 3).unwrap().unwrap();
    assert!(w.dims_agree);
    assert!(w.functor.max() <= 1e-9);
}

#[test]
fn distinct_classes_are_not_isomorphic() {
    assert!(isomorphic(&moore_datum(0), &moore_datum(1), 2).unwrap().is_none());
    assert!(isomorphic(&moore_datum(1), &moore_datum(2), 2).unwrap().is_none());
}

#[test]
fn extracted_class_is_additive() {
    let cover = Cover::star(SimplicialComplex::moore_space(3));
    let su2 = GroupSpec::special_unitary(2);
    let class = |k: i64| IntegralCohomClass {
        free_coordinates: vec![],
        torsion_coordinates: vec![k],
        torsion_orders: vec![3],
    };
    let one = phase_cocycle_for_class(&cover, &class(1)).unwrap();
    let two = phase_cocycle_for_class(&cover, &class(2)).unwrap();
    let extract = |c: &CechCocycle| {
        let datum = GluingDatum::scalar_phases(su2.clone(), c).unwrap();
        extract_twisted_special(&build_glued(&datum, 0).unwrap()).unwrap().class
    };
    let sum = extract(&one.phase_product(&two).unwrap());
    assert_eq!(sum, extract(&one).add(&extract(&two)));
    assert!(sum.is_zero());
}
