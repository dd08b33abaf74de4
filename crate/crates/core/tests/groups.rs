//! Closure and classification invariants.

use polyforge::permgroup::{classify, closure, GroupClass, Permutation};
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_is_a_group(gens in prop::collection::vec(perm(5), 1..3)) {
        let g = closure(&gens).unwrap();
        prop_assert_eq!(120 % g.order(), 0);
        prop_assert!(g.elements().iter().any(Permutation::is_identity));
        for a in 0..g.order() {
            prop_assert!(g.element(g.inv(a)).compose(g.element(a)).is_identity());
            for b in 0..g.order() {
                let ab = g.element(a).compose(g.element(b));
                prop_assert_eq!(g.index_of(&ab), Some(g.mul(a, b)));
            }
        }
        for p in &gens {
            prop_assert_eq!(g.order() % p.order(), 0);
        }
    }

    #[test]
    fn one_generator_is_cyclic(p in perm(6)) {
        let g = closure(&[p.clone()]).unwrap();
        match classify(&g) {
            GroupClass::Trivial => prop_assert_eq!(p.order(), 1),
            GroupClass::Cyclic { k, .. } => prop_assert_eq!(k, p.order()),
            other => prop_assert!(false, "classified as {:?}", other),
        }
    }
}

#[test]
fn a4_is_general() {
    let gens = [Permutation::parse("(1 2 3)", 4).unwrap(), Permutation::parse("(1 2)(3 4)", 4).unwrap()];
    let g = closure(&gens).unwrap();
    assert_eq!(g.order(), 12);
    assert!(matches!(classify(&g), GroupClass::General));
}

#[test]
fn parse_errors_carry_positions() {
    let err = Permutation::parse("(1 2)(3 x)", 4).unwrap_err();
    assert!(matches!(err, polyforge::Error::Parse { position: 8, .. }), "{err}");
    assert!(Permutation::parse("(1 5)", 4).is_err());
    assert!(Permutation::parse("(1 2 1)", 4).is_err());
}
