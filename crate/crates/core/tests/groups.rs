use proptest::prelude::*;
use symcat_core::groups::{catalog, enumerate_generated, find_element, verify_normalizer, GroupError, GroupSpec};
use symcat_core::linalg::{cx, ComplexMatrix, Tolerance};

/// Closure by repeated multiplication with an explicit word list, used as
/// an oracle for group orders.
fn closure_oracle(gens: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut out = vec![ComplexMatrix::identity(gens[0].rows())];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let h = &out[i] * g;
            if !out.iter().any(|x| x.distance(&h) < 1e-8) {
                out.push(h);
            }
        }
        i += 1;
    }
    out
}

#[test]
fn orders_match_closure_oracle() {
    for (g, order) in [
        (catalog::cyclic4_diagonal(), 4),
        (catalog::quaternion(), 8),
        (catalog::binary_octahedral(), 48),
        (catalog::binary_icosahedral(), 120),
    ] {
        assert_eq!(closure_oracle(g.generators()).len(), order);
        assert_eq!(g.order().unwrap(), order);
    }
}

#[test]
fn swap_normalizes_the_diagonal_cyclic_group() {
    let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let g = catalog::cyclic4_diagonal();
    let n = verify_normalizer(&x, &g).unwrap();
    assert!((n.phase_det() - cx(-1.0, 0.0)).norm() < 1e-12);
    // By hand: X diag(i, −i) X* = diag(−i, i), the inverse generator.
    let gen = &g.generators()[0];
    let conj = &(&x * gen) * &x.adjoint();
    assert!(conj.distance(&gen.adjoint()) < 1e-12);
}

#[test]
fn binary_octahedral_normalizes_quaternions() {
    let q8 = catalog::quaternion();
    for u in catalog::binary_octahedral().elements().unwrap() {
        assert!(verify_normalizer(u, &q8).is_ok());
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let outside = catalog::quaternion_matrix(phi / 2.0, 0.5 / phi, 0.5, 0.0);
    assert!(matches!(verify_normalizer(&outside, &q8), Err(GroupError::NotInNormalizer { .. })));
}

#[test]
fn enumeration_cap_is_reported() {
    let g = catalog::binary_icosahedral().with_enumeration_cap(50);
    assert!(matches!(g.elements(), Err(GroupError::CapExceeded { .. })));
}

fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_in_generators_are_elements(w in word()) {
        let g = catalog::binary_octahedral();
        let gens = g.generators();
        let m = w.iter().fold(ComplexMatrix::identity(2), |acc, &k| &acc * &gens[k]);
        prop_assert!(find_element(g.elements().unwrap(), &m, Tolerance::DEFAULT).is_some());
        prop_assert!(g.contains(&m).unwrap());
    }

    #[test]
    fn conjugation_permutes_elements(a in 0usize..48, b in 0usize..8) {
        let o = catalog::binary_octahedral();
        let q = catalog::quaternion();
        let u = &o.elements().unwrap()[a];
        let x = &q.elements().unwrap()[b];
        let c = &(u * x) * &u.adjoint();
        prop_assert!(q.contains(&c).unwrap());
    }

    #[test]
    fn su2_contains_exponentials(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let x = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => cx(0.0, a),
            (1, 1) => cx(0.0, -a),
            (0, 1) => cx(b, c),
            _ => cx(-b, c),
        });
        let su2 = GroupSpec::special_unitary(2);
        prop_assert!(su2.contains(&x.exp()).unwrap());
        prop_assert!(!su2.contains(&x.exp().scale(cx(0.0, 1.0))).unwrap());
    }
}

#[test]
fn enumerate_generated_directly() {
    let q = catalog::quaternion();
    let direct = enumerate_generated(q.generators(), 2, 100, Tolerance::DEFAULT).unwrap();
    assert_eq!(direct.len(), 8);
}
