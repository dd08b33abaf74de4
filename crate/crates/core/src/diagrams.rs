//! Combinatorial Schlegel diagrams and the gluing surgery on them.
//!
//! A diagram of a `d`-polytope is the complex of all its facets but one
//! (the outer simplex `D`), supported on `D`. Local vertex ids `0..d` are
//! the outer vertices `u_0..u_{d-1}`; interior vertices follow.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::lattice::{is_subset, FaceLattice};

#[derive(Clone, Debug)]
pub struct SchlegelComplex {
    /// Rank of the polytope; the complex has dimension `d − 1`.
    pub d: usize,
    pub complex: CellComplex,
    /// Marked central tile, if any.
    pub central: Option<Vec<u32>>,
    /// Source vertex index of every local vertex.
    pub origin: Vec<u32>,
}

impl SchlegelComplex {
    pub fn outer(&self) -> Vec<u32> {
        (0..self.d as u32).collect()
    }

    pub fn tile_count(&self) -> usize {
        self.complex.count(self.d - 1)
    }

    pub fn valencies(&self) -> Vec<usize> {
        self.complex.valencies()
    }

    /// Face-to-face check on the outer simplex.
    pub fn check(&self) -> Result<()> {
        self.complex.check_pseudomanifold(Some(&self.outer()))
    }

    /// Tiles sharing a ridge with `tile`.
    pub fn adjacent_tiles(&self, tile: &[u32]) -> Vec<Vec<u32>> {
        let k = self.d - 1;
        self.complex
            .tiles()
            .filter(|t| t.as_slice() != tile)
            .filter(|t| {
                let common: Vec<u32> = t.iter().copied().filter(|v| tile.contains(v)).collect();
                self.complex.contains(k - 1, &common)
            })
            .cloned()
            .collect()
    }
}

/// Schlegel diagram of `lattice` over the simplex facet with vertex indices
/// `outer`, which become `u_0..u_{d-1}` in the given order.
pub fn schlegel_with_outer(lattice: &FaceLattice, outer: &[u32]) -> Result<SchlegelComplex> {
    let d = lattice.rank();
    if d < 2 {
        return Err(Error::Unsupported(format!("Schlegel diagram of a rank-{d} lattice")));
    }
    let d = d as usize;
    let sets = lattice.vertex_sets();
    let mut key: Vec<u32> = outer.iter().map(|&v| v + 1).collect();
    key.sort_unstable();
    let facet = lattice
        .faces_of_rank(d as i32 - 1)
        .find(|&f| sets[f] == key)
        .ok_or_else(|| Error::Validation(format!("{outer:?} is not the vertex set of a facet")))?;
    if outer.len() != d {
        return Err(Error::Validation(format!(
            "outer facet {facet} has {} vertices; a simplex facet needs {d}",
            outer.len()
        )));
    }
    let n = lattice.faces_of_rank(0).count();
    let mut local = vec![u32::MAX; n];
    let mut origin = Vec::with_capacity(n);
    for (i, &v) in outer.iter().enumerate() {
        local[v as usize] = i as u32;
        origin.push(v);
    }
    for v in 0..n as u32 {
        if local[v as usize] == u32::MAX {
            local[v as usize] = origin.len() as u32;
            origin.push(v);
        }
    }
    let mut complex = CellComplex::new(d - 1);
    complex.add_vertices(n);
    for r in 1..d as i32 {
        for f in lattice.faces_of_rank(r) {
            if f == facet {
                continue;
            }
            complex.insert(r as usize, sets[f].iter().map(|&v| local[v as usize - 1]).collect())?;
        }
    }
    let s = SchlegelComplex {
        d,
        complex,
        central: None,
        origin,
    };
    s.check()?;
    Ok(s)
}

/// Schlegel diagram over a simplex facet (by face id), with the outer
/// vertices in increasing order.
pub fn schlegel_of(lattice: &FaceLattice, facet: usize) -> Result<SchlegelComplex> {
    if lattice.face_rank(facet) != lattice.rank() - 1 {
        return Err(Error::Validation(format!("face {facet} is not a facet")));
    }
    let outer: Vec<u32> = lattice.vertex_sets()[facet].iter().map(|&v| v - 1).collect();
    schlegel_with_outer(lattice, &outer)
}

/// Vertex set of the tile `F_{u_i}` of the cross-polytope diagram.
pub fn f_tile(d: usize, i: usize) -> Vec<u32> {
    let mut t: Vec<u32> = (0..d).filter(|&j| j != i).map(|j| (d + j) as u32).collect();
    t.insert(0, i as u32);
    t
}

/// Vertex set of the central tile `Z` of the cross-polytope diagram.
pub fn z_tile(d: usize) -> Vec<u32> {
    (d as u32..2 * d as u32).collect()
}

/// Diagram of the `d`-cross-polytope over its all-plus facet; vertex `+i`
/// is `i` and `−i` is `d + i`.
pub fn crosspolytope_diagram(d: usize) -> Result<SchlegelComplex> {
    if d < 3 {
        return Err(Error::Unsupported(format!("cross-polytope diagram needs d ≥ 3, got {d}")));
    }
    let lattice = fixtures::cross_polytope(d);
    let outer: Vec<u32> = (0..d as u32).collect();
    let mut s = schlegel_with_outer(&lattice, &outer)?;
    let z = z_tile(d);
    s.central = Some(z.clone());
    if z.iter().any(|v| outer.contains(v)) {
        return Err(Error::Integrity("Z meets the outer simplex".into()));
    }
    let adjacent: BTreeSet<Vec<u32>> = s.adjacent_tiles(&z).into_iter().collect();
    let expected: BTreeSet<Vec<u32>> = (0..d)
        .map(|i| {
            let mut t = f_tile(d, i);
            t.sort_unstable();
            t
        })
        .collect();
    if adjacent != expected {
        return Err(Error::Integrity("tiles adjacent to Z are not the F_u tiles".into()));
    }
    for i in 0..d {
        let meet: Vec<u32> = f_tile(d, i).into_iter().filter(|v| outer.contains(v)).collect();
        if meet != [i as u32] {
            return Err(Error::Integrity(format!("F_u{i} meets D in {meet:?}")));
        }
    }
    Ok(s)
}

/// Whether `m` is an apex valency available in the pyramid family.
pub fn pyramid_admissible(m: usize, d: usize) -> bool {
    d >= 3 && m >= d && (m - d) % (d - 2) == 0
}

/// Least admissible apex valency `≥ at_least`.
pub fn next_admissible(at_least: usize, d: usize) -> usize {
    let mut m = at_least.max(d);
    while !pyramid_admissible(m, d) {
        m += 1;
    }
    m
}

/// Simple `(d − 1)`-polytope with `m` vertices by iterated vertex
/// truncation of a simplex, as the facet set of each vertex.
///
/// Facet 0 is never touched and stays a simplex.
fn truncated_simplex(m: usize, d: usize) -> Vec<BTreeSet<usize>> {
    let mut vertices: Vec<BTreeSet<usize>> = (0..d).map(|w| (0..d).filter(|&f| f != w).collect()).collect();
    let mut next_facet = d;
    let mut target = 0;
    while vertices.len() < m {
        let cut = vertices.remove(target);
        for &f in &cut {
            let mut s = cut.clone();
            s.remove(&f);
            s.insert(next_facet);
            vertices.push(s);
        }
        next_facet += 1;
        target = vertices.len() - 1;
    }
    vertices
}

/// Diagram of the pyramid over a simple `(d − 1)`-polytope with `m`
/// vertices. The apex is `u_0`; the outer simplex is the apex over the
/// base's simplex facet.
pub fn pyramid_diagram(m: usize, d: usize) -> Result<SchlegelComplex> {
    if d < 3 {
        return Err(Error::Unsupported(format!("pyramid diagram needs d ≥ 3, got {d}")));
    }
    if !pyramid_admissible(m, d) {
        let below = (d..m).rev().find(|&x| pyramid_admissible(x, d));
        let above = next_admissible(m, d);
        let near = match below {
            Some(b) => format!("{b} or {above}"),
            None => above.to_string(),
        };
        return Err(Error::Validation(format!(
            "apex valency {m} is not admissible for d = {d}; nearest admissible: {near}"
        )));
    }
    let base = truncated_simplex(m, d);
    let apex = m;
    let n_facets = base.iter().flatten().max().map_or(0, |&f| f + 1);
    let mut facets: Vec<Vec<usize>> = vec![(0..m).collect()];
    for f in 0..n_facets {
        let mut g: Vec<usize> = (0..m).filter(|&w| base[w].contains(&f)).collect();
        if g.is_empty() {
            continue;
        }
        g.push(apex);
        facets.push(g);
    }
    let lattice = FaceLattice::from_facets(m + 1, &facets)?;
    let mut outer: Vec<u32> = vec![apex as u32];
    outer.extend((0..m as u32).filter(|&w| base[w as usize].contains(&0)));
    schlegel_with_outer(&lattice, &outer)
}

/// Facets of the cyclic polytope `C(v, d)` by Gale evenness.
pub fn cyclic_polytope_facets(v: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let inside = |x: usize| subset.binary_search(&x).is_ok();
        let gale = (0..v).filter(|&i| !inside(i)).all(|i| {
            (i + 1..v)
                .filter(|&j| !inside(j))
                .all(|j| subset.iter().filter(|&&s| i < s && s < j).count() % 2 == 0)
        });
        if gale {
            out.push(subset.clone());
        }
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] < v - d + i {
                subset[i] += 1;
                for j in i + 1..d {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Face lattice of the cyclic polytope `C(v, d)`.
pub fn simplicial_polytope(v: usize, d: usize) -> Result<FaceLattice> {
    if d < 2 || v < d + 1 {
        return Err(Error::Validation(format!("cyclic polytope C({v}, {d}) needs d ≥ 2 and v ≥ d + 1")));
    }
    FaceLattice::from_facets(v, &cyclic_polytope_facets(v, d))
}

/// Diagram of `C(v, d)` over its lexicographically least facet.
pub fn simplicial_diagram(v: usize, d: usize) -> Result<SchlegelComplex> {
    let facets = cyclic_polytope_facets(v, d);
    let lattice = simplicial_polytope(v, d)?;
    let outer: Vec<u32> = facets[0].iter().map(|&x| x as u32).collect();
    schlegel_with_outer(&lattice, &outer)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    Crosspoly,
    Pyramid { m: usize },
    Simplicial { v_count: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeFamilySpec {
    pub kind: FamilyKind,
    pub d: usize,
}

impl PolytopeFamilySpec {
    pub fn diagram(&self) -> Result<SchlegelComplex> {
        match self.kind {
            FamilyKind::Crosspoly => crosspolytope_diagram(self.d),
            FamilyKind::Pyramid { m } => pyramid_diagram(m, self.d),
            FamilyKind::Simplicial { v_count } => simplicial_diagram(v_count, self.d),
        }
    }
}

/// Replaces the simplex tile `target` of `host` by the tiles of `insert`.
///
/// `target[i]` is the image of `u_i`. Interior vertices of the insert get
/// fresh host ids in insert order; the returned vector maps every insert
/// vertex to its host vertex.
pub fn glue(host: &mut CellComplex, target: &[u32], insert: &SchlegelComplex) -> Result<Vec<u32>> {
    let k = host.dim();
    if insert.complex.dim() != k {
        return Err(Error::Validation(format!(
            "cannot glue a {}-dimensional diagram into a {k}-dimensional complex",
            insert.complex.dim()
        )));
    }
    if target.len() != insert.d {
        return Err(Error::Validation(format!(
            "vertex map has {} images for {} outer vertices",
            target.len(),
            insert.d
        )));
    }
    let distinct: BTreeSet<u32> = target.iter().copied().collect();
    if distinct.len() != target.len() {
        return Err(Error::Validation(format!("vertex map {target:?} is not injective")));
    }
    if !host.contains(k, target) {
        return Err(Error::Validation(format!("{target:?} is not a tile of the host")));
    }
    if target.len() != k + 1 {
        return Err(Error::Validation(format!("target tile {target:?} is not a simplex")));
    }
    let outer = insert.outer();
    for dim in 1..=k {
        let on_boundary = insert.complex.cells(dim).filter(|c| is_subset(c, &outer)).count();
        let expected = if dim < k { binomial(k + 1, dim + 1) } else { 0 };
        if on_boundary != expected {
            return Err(Error::Validation(format!(
                "insert has {on_boundary} {dim}-cells on its outer simplex, expected {expected}"
            )));
        }
    }
    let mut map: Vec<u32> = target.to_vec();
    for _ in insert.d..insert.complex.n_vertices() {
        map.push(host.add_vertex());
    }
    host.remove(k, target);
    for dim in 1..=k {
        for c in insert.complex.cells(dim) {
            host.insert(dim, c.iter().map(|&v| map[v as usize]).collect())?;
        }
    }
    Ok(map)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Provenance of a vertex of a decorated simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VertexKind {
    /// Outer vertex `u_i`.
    Outer { i: usize },
    /// Cross-polytope vertex `−j`, a vertex of `Z` and of `L`.
    Cross { j: usize },
    /// Base vertex of the pyramid glued into `F_{u_i}`.
    PyramidInterior { i: usize },
    /// Interior vertex of `L`'s diagram.
    LInterior,
}

/// The complex `R^L`: a cross-polytope diagram with pyramids of apex
/// valency `m[i]` glued into each `F_{u_i}` and `L`'s diagram glued into `Z`.
#[derive(Clone, Debug)]
pub struct DecoratedSimplex {
    pub diagram: SchlegelComplex,
    pub kinds: Vec<VertexKind>,
    /// Valency of every vertex predicted from the families alone.
    pub predicted: Vec<usize>,
}

pub fn decorate_simplex(d: usize, m: &[usize], l_vertices: usize) -> Result<DecoratedSimplex> {
    if m.len() != d {
        return Err(Error::Validation(format!("need {d} apex valencies, got {}", m.len())));
    }
    let cross = crosspolytope_diagram(d)?;
    let mut host = cross.complex.clone();
    let mut kinds: Vec<VertexKind> = (0..d)
        .map(|i| VertexKind::Outer { i })
        .chain((0..d).map(|j| VertexKind::Cross { j }))
        .collect();
    let mut predicted: Vec<usize> = m.iter().map(|&mi| mi + d - 1).collect();
    predicted.extend(std::iter::repeat(0).take(d));
    for (i, &mi) in m.iter().enumerate() {
        let pyramid = pyramid_diagram(mi, d)?;
        let map = glue(&mut host, &f_tile(d, i), &pyramid)?;
        for _ in d..map.len() {
            kinds.push(VertexKind::PyramidInterior { i });
            predicted.push(d);
        }
    }
    let l_lattice = simplicial_polytope(l_vertices, d)?;
    let l = simplicial_diagram(l_vertices, d)?;
    let map = glue(&mut host, &z_tile(d), &l)?;
    for (local, &hv) in map.iter().enumerate() {
        let val_l = l_lattice.valency(l.origin[local] as usize + 1);
        if local < d {
            predicted[hv as usize] = val_l + 2 * (d - 1);
        } else {
            kinds.push(VertexKind::LInterior);
            predicted.push(val_l);
        }
    }
    let diagram = SchlegelComplex {
        d,
        origin: (0..host.n_vertices() as u32).collect(),
        complex: host,
        central: None,
    };
    diagram.check()?;
    Ok(DecoratedSimplex {
        diagram,
        kinds,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{octahedron, pyramid};

    #[test]
    fn crosspolytope_counts() {
        let s = crosspolytope_diagram(3).unwrap();
        assert_eq!(s.complex.n_vertices(), 6);
        assert_eq!(s.tile_count(), 7);
        assert_eq!(s.valencies()[0], 4);
        assert_eq!(crosspolytope_diagram(4).unwrap().tile_count(), 15);
        for d in 3..=5 {
            let s = crosspolytope_diagram(d).unwrap();
            assert_eq!(s.tile_count(), (1 << d) - 1);
            let z = s.central.clone().unwrap();
            assert_eq!(s.adjacent_tiles(&z).len(), d);
        }
        assert!(crosspolytope_diagram(2).is_err());
    }

    #[test]
    fn octahedron_diagram_matches_crosspolytope() {
        let oct = octahedron();
        let facet = oct.faces_of_rank(2).next().unwrap();
        let s = schlegel_of(&oct, facet).unwrap();
        let mut a = s.valencies();
        let mut b = crosspolytope_diagram(3).unwrap().valencies();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
        assert_eq!(s.tile_count(), 7);
    }

    #[test]
    fn schlegel_examples() {
        assert_eq!(simplicial_diagram(6, 3).unwrap().tile_count(), 7);
        let sp = pyramid(4);
        let tri = sp
            .faces_of_rank(2)
            .find(|&f| sp.covers(f).len() == 3)
            .unwrap();
        assert_eq!(schlegel_of(&sp, tri).unwrap().tile_count(), 4);
        let square = sp.faces_of_rank(2).find(|&f| sp.covers(f).len() == 4).unwrap();
        assert!(schlegel_of(&sp, square).is_err());
    }

    #[test]
    fn pyramid_examples() {
        let p = pyramid_diagram(5, 3).unwrap();
        assert_eq!(p.complex.n_vertices(), 6);
        assert_eq!(p.tile_count(), 5);
        let sizes: Vec<usize> = p.complex.tiles().map(Vec::len).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 3).count(), 4);
        assert_eq!(sizes.iter().filter(|&&s| s == 5).count(), 1);
        assert_eq!(p.valencies()[0], 5);
        // the tetrahedron: three tiles around one interior vertex
        let t = pyramid_diagram(3, 3).unwrap();
        assert_eq!(t.tile_count(), 3);
        assert_eq!(t.complex.n_vertices(), 4);
    }

    #[test]
    fn pyramid_valencies_by_count() {
        for d in 3..=5 {
            for k in 0..4 {
                let m = d + k * (d - 2);
                let p = pyramid_diagram(m, d).unwrap();
                let val = p.valencies();
                assert_eq!(val[0], m, "apex, d = {d}, m = {m}");
                assert!(val[1..].iter().all(|&v| v == d), "d = {d}, m = {m}: {val:?}");
            }
        }
    }

    #[test]
    fn inadmissible_pyramid_names_neighbors() {
        let err = pyramid_diagram(5, 4).unwrap_err().to_string();
        assert!(err.contains("4 or 6"), "{err}");
        assert!(pyramid_diagram(2, 3).is_err());
        assert_eq!(next_admissible(5, 5), 5);
        assert_eq!(next_admissible(6, 5), 8);
    }

    #[test]
    fn cyclic_polytopes() {
        let c = simplicial_polytope(6, 3).unwrap();
        assert_eq!(c.f_vector()[3], 8);
        assert_eq!(simplicial_polytope(5, 4).unwrap().f_vector(), vec![1, 5, 10, 10, 5, 1]);
        assert_eq!(cyclic_polytope_facets(7, 4).len(), 14);
        // upper bound theorem: C(v, 4) has v(v − 3)/2 facets
        for v in 5..12 {
            assert_eq!(cyclic_polytope_facets(v, 4).len(), v * (v - 3) / 2);
        }
        for v in 4..10 {
            let c = simplicial_polytope(v, 3).unwrap();
            assert!(c.validate().is_valid());
            assert_eq!(c.f_vector()[3], 2 * v - 4);
        }
    }

    #[test]
    fn glue_examples() {
        let mut host = CellComplex::new(2);
        host.add_vertices(3);
        host.insert_simplex(&[0, 1, 2]).unwrap();
        let map = glue(&mut host, &[0, 1, 2], &pyramid_diagram(3, 3).unwrap()).unwrap();
        assert_eq!(map.len(), 4);
        assert_eq!(host.n_vertices(), 4);
        assert_eq!(host.count(2), 3);

        let mut host = CellComplex::new(2);
        host.add_vertices(3);
        host.insert_simplex(&[0, 1, 2]).unwrap();
        glue(&mut host, &[2, 0, 1], &crosspolytope_diagram(3).unwrap()).unwrap();
        assert_eq!(host.n_vertices(), 6);
        assert_eq!(host.count(2), 7);
        host.check_pseudomanifold(Some(&[0, 1, 2])).unwrap();
    }

    #[test]
    fn glue_errors() {
        let mut host = CellComplex::new(2);
        host.add_vertices(4);
        host.insert_simplex(&[0, 1, 2]).unwrap();
        let p = pyramid_diagram(3, 3).unwrap();
        assert!(glue(&mut host, &[0, 0, 1], &p).is_err());
        assert!(glue(&mut host, &[0, 1, 3], &p).is_err());
        assert!(glue(&mut host, &[0, 1], &p).is_err());
        let mut sq = CellComplex::new(2);
        sq.add_vertices(4);
        for e in [[0, 1], [1, 2], [2, 3], [0, 3]] {
            sq.insert(1, e.to_vec()).unwrap();
        }
        sq.insert(2, vec![0, 1, 2, 3]).unwrap();
        assert!(glue(&mut sq, &[0, 1, 2, 3], &p).is_err());
    }

    #[test]
    fn double_glue_gives_large_valency() {
        for d in 3..=5 {
            let m = next_admissible(d + 3, d);
            let mut host = crosspolytope_diagram(d).unwrap().complex;
            glue(&mut host, &f_tile(d, 1), &pyramid_diagram(m, d).unwrap()).unwrap();
            assert_eq!(host.valencies()[1], m + d - 1);
        }
    }

    #[test]
    fn decorated_simplex_valencies() {
        for d in 3..=5 {
            let m: Vec<usize> = (0..d).map(|i| next_admissible(d + 2 * i, d)).collect();
            let dec = decorate_simplex(d, &m, d + 3).unwrap();
            let val = dec.diagram.valencies();
            assert_eq!(val, dec.predicted, "d = {d}");
            for (i, &mi) in m.iter().enumerate() {
                assert_eq!(val[i], mi + d - 1);
            }
            for (v, k) in dec.kinds.iter().enumerate() {
                if matches!(k, VertexKind::PyramidInterior { .. }) {
                    assert_eq!(val[v], d);
                }
            }
        }
    }
}
