//! The flag-walk engine against the backtracking oracle.

use polyforge::autgroup::{automorphisms, brute_force_automorphisms, is_automorphism, BRUTE_FORCE_FACE_CAP};
use polyforge::fixtures::{self, polygon};
use polyforge::hull::{hull_lattice, RationalPoint};
use polyforge::lattice::FaceLattice;
use proptest::prelude::*;

fn relabel(l: &FaceLattice, perm: &[usize]) -> FaceLattice {
    let mut faces = vec![(0, Vec::new()); l.len()];
    for f in 0..l.len() {
        faces[perm[f]] = (l.face_rank(f), l.covers(f).iter().map(|&c| perm[c as usize]).collect());
    }
    FaceLattice::new(l.rank(), faces).unwrap()
}

fn small_fixtures() -> Vec<(String, FaceLattice)> {
    let mut out: Vec<(String, FaceLattice)> = fixtures::NAMES
        .iter()
        .map(|&n| (n.to_string(), fixtures::by_name(n).unwrap()))
        .filter(|(_, l)| l.len() <= BRUTE_FORCE_FACE_CAP)
        .collect();
    out.extend((3..=8).map(|k| (format!("{k}-gon"), polygon(k))));
    out
}

#[test]
fn known_orders() {
    assert_eq!(automorphisms(&fixtures::cube()).unwrap().order, 48);
    assert_eq!(automorphisms(&fixtures::simplex(3)).unwrap().order, 24);
    for k in 3..=8 {
        assert_eq!(automorphisms(&polygon(k)).unwrap().order, 2 * k);
    }
}

#[test]
fn engine_equals_oracle_on_fixtures() {
    for (name, l) in small_fixtures() {
        let engine = automorphisms(&l).unwrap();
        let oracle = brute_force_automorphisms(&l).unwrap();
        assert_eq!(engine.elements, oracle.elements, "{name}");
        assert!(engine.elements.iter().all(|p| is_automorphism(&l, p)));
    }
}

#[test]
fn oracle_refuses_large_lattices() {
    assert!(brute_force_automorphisms(&fixtures::cross_polytope(4)).is_err());
}

fn point_sets() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::btree_set(prop::collection::vec(-3i64..=3, 3), 5..=7).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relabelled_fixtures_agree(idx in 0usize..19, seed in any::<u64>()) {
        let all = small_fixtures();
        let (_, l) = &all[idx % all.len()];
        // a seeded shuffle of the face ids
        let mut perm: Vec<usize> = (0..l.len()).collect();
        let mut state = seed | 1;
        for i in (1..perm.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            perm.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let r = relabel(l, &perm);
        let engine = automorphisms(&r).unwrap();
        let oracle = brute_force_automorphisms(&r).unwrap();
        prop_assert_eq!(engine.order, automorphisms(l).unwrap().order);
        prop_assert_eq!(engine.elements, oracle.elements);
    }

    #[test]
    fn random_hulls_agree(points in point_sets()) {
        let pts: Vec<RationalPoint> = points.iter().map(|p| RationalPoint::from_ints(p)).collect();
        let Ok(hull) = hull_lattice(&pts) else { return Ok(()) };
        let l = hull.lattice;
        prop_assume!(l.len() <= BRUTE_FORCE_FACE_CAP);
        let engine = automorphisms(&l).unwrap();
        let oracle = brute_force_automorphisms(&l).unwrap();
        prop_assert_eq!(engine.elements, oracle.elements);
    }
}
