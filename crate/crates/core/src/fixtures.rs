//! Small named face lattices used as built-ins and test fixtures.

use crate::lattice::FaceLattice;

fn build(n: usize, facets: &[Vec<usize>]) -> FaceLattice {
    FaceLattice::from_facets(n, facets).expect("fixture incidences are polytopal")
}

/// The `k`-gon for `k ≥ 2`; `k = 2` is the digon.
pub fn polygon(k: usize) -> FaceLattice {
    assert!(k >= 2, "polygon needs k ≥ 2");
    if k == 2 {
        // both edges have the same vertex set, so build it from covers
        return FaceLattice::new(
            2,
            vec![(-1, vec![]), (0, vec![0]), (0, vec![0]), (1, vec![1, 2]), (1, vec![1, 2]), (2, vec![3, 4])],
        )
        .expect("digon");
    }
    let facets: Vec<Vec<usize>> = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
    build(k, &facets)
}

/// The `d`-simplex.
pub fn simplex(d: usize) -> FaceLattice {
    if d == 0 {
        return FaceLattice::point();
    }
    let facets: Vec<Vec<usize>> = (0..=d).map(|skip| (0..=d).filter(|&v| v != skip).collect()).collect();
    build(d + 1, &facets)
}

/// The 3-cube; vertex `v` has coordinates given by the bits of `v`.
pub fn cube() -> FaceLattice {
    let facets: Vec<Vec<usize>> = (0..3)
        .flat_map(|axis| (0..2).map(move |bit| (0..8).filter(|v| (v >> axis) & 1 == bit).collect()))
        .collect();
    build(8, &facets)
}

/// The `d`-dimensional cross-polytope; vertex `i` is `+e_i`, `d + i` is `−e_i`.
pub fn cross_polytope(d: usize) -> FaceLattice {
    let facets: Vec<Vec<usize>> = (0..1usize << d)
        .map(|signs| (0..d).map(|i| if signs >> i & 1 == 0 { i } else { d + i }).collect())
        .collect();
    build(2 * d, &facets)
}

pub fn octahedron() -> FaceLattice {
    cross_polytope(3)
}

/// Prism over a `k`-gon.
pub fn prism(k: usize) -> FaceLattice {
    let mut facets: Vec<Vec<usize>> = vec![(0..k).collect(), (k..2 * k).collect()];
    for i in 0..k {
        let j = (i + 1) % k;
        facets.push(vec![i, j, k + i, k + j]);
    }
    build(2 * k, &facets)
}

/// Pyramid over a `k`-gon with apex `k`.
pub fn pyramid(k: usize) -> FaceLattice {
    let mut facets: Vec<Vec<usize>> = vec![(0..k).collect()];
    for i in 0..k {
        facets.push(vec![i, (i + 1) % k, k]);
    }
    build(k + 1, &facets)
}

/// Looks up a fixture by name: `point`, `segment`, `triangle`, `square`,
/// `pentagon`, `hexagon`, `tetrahedron`, `cube`, `octahedron`, `prism3`,
/// `square-pyramid`, `4-simplex`.
pub fn by_name(name: &str) -> Option<FaceLattice> {
    Some(match name {
        "point" => FaceLattice::point(),
        "segment" => simplex(1),
        "digon" => polygon(2),
        "triangle" => polygon(3),
        "square" => polygon(4),
        "pentagon" => polygon(5),
        "hexagon" => polygon(6),
        "tetrahedron" => simplex(3),
        "cube" => cube(),
        "octahedron" => octahedron(),
        "prism3" => prism(3),
        "square-pyramid" => pyramid(4),
        "4-simplex" => simplex(4),
        _ => return None,
    })
}

pub const NAMES: &[&str] = &[
    "point",
    "segment",
    "digon",
    "triangle",
    "square",
    "pentagon",
    "hexagon",
    "tetrahedron",
    "cube",
    "octahedron",
    "prism3",
    "square-pyramid",
    "4-simplex",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_is_valid() {
        for name in NAMES {
            let lat = by_name(name).unwrap();
            assert!(lat.validate().is_valid(), "{name}");
        }
    }

    #[test]
    fn f_vectors() {
        assert_eq!(polygon(2).f_vector(), vec![1, 2, 2, 1]);
        assert_eq!(octahedron().f_vector(), vec![1, 6, 12, 8, 1]);
        assert_eq!(prism(3).f_vector(), vec![1, 6, 9, 5, 1]);
        assert_eq!(pyramid(4).f_vector(), vec![1, 5, 8, 5, 1]);
        assert_eq!(simplex(4).f_vector(), vec![1, 5, 10, 10, 5, 1]);
        assert_eq!(cross_polytope(4).f_vector(), vec![1, 8, 24, 32, 16, 1]);
    }
}
