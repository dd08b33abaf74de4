//! Cross-polytope diagrams and decorated simplices in ranks 3, 4 and 5.

use polyforge::diagrams::{crosspolytope_diagram, decorate_simplex, next_admissible, pyramid_admissible, z_tile};
use proptest::prelude::*;

#[test]
fn crosspolytope_diagram_shape() {
    for d in 3..=5 {
        let s = crosspolytope_diagram(d).unwrap();
        s.check().unwrap();
        assert_eq!(s.tile_count(), (1 << d) - 1, "d = {d}");
        let outer = s.outer();
        let z = z_tile(d);
        assert!(z.iter().all(|v| !outer.contains(v)));
        assert!(s.complex.contains(d - 1, &z));
        let adjacent = s.adjacent_tiles(&z);
        assert_eq!(adjacent.len(), d);
        for t in &adjacent {
            assert_eq!(t.iter().filter(|v| outer.contains(v)).count(), 1);
        }
    }
}

#[test]
fn admissible_values() {
    assert!(pyramid_admissible(3, 3) && pyramid_admissible(4, 3));
    assert!(pyramid_admissible(4, 4) && !pyramid_admissible(5, 4) && pyramid_admissible(6, 4));
    assert!(!pyramid_admissible(2, 3));
    assert_eq!(next_admissible(7, 5), 8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn decorated_outer_valencies(d in 3usize..=5, raw in prop::collection::vec(0usize..6, 5), extra in 2usize..5) {
        let m: Vec<usize> = raw[..d].iter().map(|&r| next_admissible(d + r, d)).collect();
        let dec = decorate_simplex(d, &m, d + extra).unwrap();
        dec.diagram.check().unwrap();
        let val = dec.diagram.valencies();
        prop_assert_eq!(&val, &dec.predicted);
        for (i, &mi) in m.iter().enumerate() {
            prop_assert_eq!(val[i], mi + d - 1);
        }
    }
}
