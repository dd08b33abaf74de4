//! Polytopal complexes whose cells are identified by their vertex sets.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::lattice::{is_subset, FaceLattice};

/// A pure complex of dimension `dim`. `cells[k]` holds the `k`-cells as
/// sorted vertex lists; `cells[0]` holds the singletons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    dim: usize,
    n_vertices: usize,
    cells: Vec<BTreeSet<Vec<u32>>>,
}

impl CellComplex {
    pub fn new(dim: usize) -> Self {
        CellComplex {
            dim,
            n_vertices: 0,
            cells: vec![BTreeSet::new(); dim + 1],
        }
    }

    /// Proper faces of a lattice as a complex of dimension `rank − 1`;
    /// vertex `i` is face `1 + i`.
    pub fn from_lattice(lattice: &FaceLattice) -> Result<Self> {
        let rank = lattice.rank();
        if rank < 1 {
            return Err(Error::Unsupported(format!("complex of a rank-{rank} lattice")));
        }
        let mut c = CellComplex::new(rank as usize - 1);
        let n = lattice.faces_of_rank(0).count();
        c.add_vertices(n);
        let sets = lattice.vertex_sets();
        for r in 1..rank {
            for f in lattice.faces_of_rank(r) {
                c.insert(r as usize, sets[f].iter().map(|&v| v - 1).collect())?;
            }
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn add_vertex(&mut self) -> u32 {
        let v = self.n_vertices as u32;
        self.n_vertices += 1;
        self.cells[0].insert(vec![v]);
        v
    }

    pub fn add_vertices(&mut self, n: usize) {
        for _ in 0..n {
            self.add_vertex();
        }
    }

    /// Inserts a cell; returns whether it was new.
    pub fn insert(&mut self, dim: usize, mut vertices: Vec<u32>) -> Result<bool> {
        if dim == 0 || dim > self.dim {
            return Err(Error::Structural(format!("cell of dimension {dim} in a {}-complex", self.dim)));
        }
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.len() <= dim {
            return Err(Error::Structural(format!("{dim}-cell {vertices:?} has too few vertices")));
        }
        if let Some(v) = vertices.iter().find(|&&v| v as usize >= self.n_vertices) {
            return Err(Error::Structural(format!("cell uses unknown vertex {v}")));
        }
        Ok(self.cells[dim].insert(vertices))
    }

    /// Inserts a simplex and all of its faces.
    pub fn insert_simplex(&mut self, vertices: &[u32]) -> Result<()> {
        let k = vertices.len();
        if k == 0 || k > self.dim + 1 {
            return Err(Error::Structural(format!("simplex on {k} vertices in a {}-complex", self.dim)));
        }
        for mask in 1u32..(1 << k) {
            let sub: Vec<u32> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| vertices[i]).collect();
            if sub.len() >= 2 {
                self.insert(sub.len() - 1, sub)?;
            }
        }
        Ok(())
    }

    pub fn remove(&mut self, dim: usize, vertices: &[u32]) -> bool {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        dim <= self.dim && self.cells[dim].remove(&key)
    }

    pub fn contains(&self, dim: usize, vertices: &[u32]) -> bool {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        dim <= self.dim && self.cells[dim].contains(&key)
    }

    pub fn cells(&self, dim: usize) -> impl Iterator<Item = &Vec<u32>> + '_ {
        self.cells[dim].iter()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.cells[dim].len()
    }

    pub fn tiles(&self) -> impl Iterator<Item = &Vec<u32>> + '_ {
        self.cells[self.dim].iter()
    }

    /// Valency of every vertex in the edge graph.
    pub fn valencies(&self) -> Vec<usize> {
        let mut val = vec![0; self.n_vertices];
        if self.dim >= 1 {
            for e in &self.cells[1] {
                val[e[0] as usize] += 1;
                val[e[1] as usize] += 1;
            }
        }
        val
    }

    /// Tiles containing every vertex of `cell`.
    pub fn tiles_containing<'a>(&'a self, cell: &'a [u32]) -> impl Iterator<Item = &'a Vec<u32>> + 'a {
        self.cells[self.dim].iter().filter(move |t| is_subset(cell, t))
    }

    /// Checks that every ridge lies in exactly two tiles, except ridges
    /// inside `boundary`, which lie in exactly one.
    pub fn check_pseudomanifold(&self, boundary: Option<&[u32]>) -> Result<()> {
        if self.dim == 0 {
            return Ok(());
        }
        let ridges: Vec<&Vec<u32>> = self.cells[self.dim - 1].iter().collect();
        let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); self.n_vertices];
        for (i, r) in ridges.iter().enumerate() {
            at_vertex[r[0] as usize].push(i);
        }
        let mut count: HashMap<&[u32], usize> = HashMap::new();
        for r in &ridges {
            count.insert(r, 0);
        }
        let mut subsets: Vec<&[u32]> = Vec::new();
        for t in &self.cells[self.dim] {
            subsets.clear();
            // a ridge inside t is found through its least vertex
            for &v in t {
                for &i in &at_vertex[v as usize] {
                    if is_subset(ridges[i], t) {
                        subsets.push(ridges[i]);
                    }
                }
            }
            if subsets.len() < self.dim + 1 {
                return Err(Error::Integrity(format!("tile {t:?} has only {} ridges", subsets.len())));
            }
            for r in &subsets {
                *count.get_mut(r).unwrap() += 1;
            }
        }
        for (r, n) in count {
            let want = match boundary {
                Some(b) if is_subset(r, b) => 1,
                _ => 2,
            };
            if n != want {
                return Err(Error::Integrity(format!("ridge {r:?} lies in {n} tiles, expected {want}")));
            }
        }
        Ok(())
    }

    /// Closes the complex with improper faces: a rank-`(dim + 1)` lattice
    /// whose vertex `i` is face `1 + i`.
    pub fn to_lattice(&self) -> Result<FaceLattice> {
        let cells = (1..=self.dim)
            .flat_map(|k| self.cells[k].iter().map(move |c| (k as i32, c.clone())))
            .collect();
        FaceLattice::from_vertex_sets(self.dim as i32 + 1, self.n_vertices, cells)
    }

    /// Euler characteristic of the proper cells.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    /// Relabels vertices through `map` (old id ↦ new id), which must be a
    /// permutation of `0..n_vertices`.
    pub fn relabel(&self, map: &[u32]) -> CellComplex {
        let mut out = CellComplex::new(self.dim);
        out.add_vertices(self.n_vertices);
        for k in 1..=self.dim {
            for c in &self.cells[k] {
                let mut img: Vec<u32> = c.iter().map(|&v| map[v as usize]).collect();
                img.sort_unstable();
                out.cells[k].insert(img);
            }
        }
        out
    }
}
