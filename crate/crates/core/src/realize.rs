//! Convex realization of barycentric subdivisions.
//!
//! Starting from a convex polytope `R` with its centroid at the origin, the
//! centroids of the faces of rank `k − 1, k − 2, …, 1` are pulled outward
//! along their rays, one rank at a time. Each pulled point lies just beyond
//! the facets that contain its face and below every other facet, so the
//! face disappears and is replaced by a cone. The last polytope has one
//! simplex facet per flag of `R`.

use std::collections::{HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::{affine_pivots, hull_lattice_with_caps, to_decimal, Facet, RationalPoint, MAX_DIM, MAX_POINTS};
use crate::lattice::{barycentric_subdivision, FaceLattice};

pub const DEFAULT_Q_MAX: u64 = 1 << 16;
pub const MAX_REALIZE_DIM: usize = 4;

/// Named polytopes with exact coordinates.
pub const BUILTINS: &[&str] = &["triangle", "pentagon", "tetrahedron", "cube", "octahedron", "4-simplex"];

/// A full-dimensional convex polytope with exact vertices. Facets are
/// `normal·x ≤ offset`, the interior on the negative side.
#[derive(Clone, Debug)]
pub struct GeometricPolytope {
    pub vertices: Vec<RationalPoint>,
    /// Vertex `i` is face `1 + i`.
    pub lattice: FaceLattice,
    pub facets: Vec<Facet>,
}

impl GeometricPolytope {
    /// Hull of `points`; every point must be a vertex.
    pub fn from_points(points: Vec<RationalPoint>) -> Result<Self> {
        Self::from_points_with_cap(points, MAX_POINTS)
    }

    pub fn from_points_with_cap(points: Vec<RationalPoint>, max_points: usize) -> Result<Self> {
        let hull = hull_lattice_with_caps(&points, MAX_DIM, max_points)?;
        Ok(GeometricPolytope {
            vertices: hull.points,
            lattice: hull.lattice,
            facets: hull.facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.lattice.rank().max(0) as usize
    }

    /// Each facet's vertices lie on its hyperplane and all others strictly
    /// below it.
    pub fn check(&self) -> Result<()> {
        for (fi, f) in self.facets.iter().enumerate() {
            let mut on = f.vertices.iter().peekable();
            for (i, p) in self.vertices.iter().enumerate() {
                let s = f.slack(p);
                let expected_on = on.peek() == Some(&&i);
                if expected_on {
                    on.next();
                    if !s.is_zero() {
                        return Err(Error::Integrity(format!("facet {fi} does not contain its vertex {i}")));
                    }
                } else if !s.is_negative() {
                    return Err(Error::Integrity(format!("vertex {i} is not below facet {fi}")));
                }
            }
        }
        Ok(())
    }

    /// Whether the open segment between `p` and `q` meets the interior.
    pub fn segment_meets_interior(&self, p: &RationalPoint, q: &RationalPoint) -> bool {
        let dir = q.sub(p);
        // s ranges over (lo, hi) ∩ [0, 1]; None means unbounded
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for f in &self.facets {
            let c0 = &f.offset - p.dot(&f.normal);
            let c1 = dir.dot(&f.normal);
            if c1.is_zero() {
                if !c0.is_positive() {
                    return false;
                }
                continue;
            }
            let bound = &c0 / &c1;
            if c1.is_positive() {
                if hi.as_ref().map_or(true, |h| bound < *h) {
                    hi = Some(bound);
                }
            } else if lo.as_ref().map_or(true, |l| bound > *l) {
                lo = Some(bound);
            }
        }
        let below_hi = |x: &BigRational| hi.as_ref().map_or(true, |h| x < h);
        match &lo {
            Some(l) => below_hi(l) && *l < BigRational::one() && hi.as_ref().map_or(true, |h| h.is_positive()),
            None => hi.as_ref().map_or(true, |h| h.is_positive()),
        }
    }
}

/// Exact coordinates of a built-in polytope.
pub fn builtin(name: &str) -> Result<GeometricPolytope> {
    let pts: Vec<Vec<i64>> = match name {
        "triangle" => vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
        "pentagon" => vec![vec![2, 0], vec![1, 2], vec![-1, 2], vec![-2, 0], vec![0, -2]],
        "tetrahedron" => vec![vec![1, 1, 1], vec![1, -1, -1], vec![-1, 1, -1], vec![-1, -1, 1]],
        "cube" => (0..8)
            .map(|m| (0..3).map(|i| if m >> i & 1 == 1 { 1 } else { -1 }).collect())
            .collect(),
        "octahedron" => (0..6)
            .map(|m| {
                let mut v = vec![0; 3];
                v[m % 3] = if m < 3 { 1 } else { -1 };
                v
            })
            .collect(),
        "4-simplex" => {
            let mut v: Vec<Vec<i64>> = (0..4)
                .map(|i| (0..4).map(|j| if i == j { 4 } else { -1 }).collect())
                .collect();
            v.push(vec![-1; 4]);
            v
        }
        other => {
            return Err(Error::Validation(format!(
                "unknown polytope `{other}`; expected one of {}",
                BUILTINS.join(", ")
            )))
        }
    };
    GeometricPolytope::from_points(pts.iter().map(|p| RationalPoint::from_ints(p)).collect())
}

#[derive(Clone, Debug)]
pub struct RealizeOptions {
    /// Largest denominator tried when placing a pulled point.
    pub q_max: u64,
    /// Cap on the vertex count of the result.
    pub max_points: usize,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions {
            q_max: DEFAULT_Q_MAX,
            max_points: MAX_POINTS,
        }
    }
}

/// The point chosen for one face, at `t · b_F`.
#[derive(Clone, Debug)]
pub struct PulledPoint {
    /// Face id in the source lattice.
    pub face: usize,
    pub t: BigRational,
    pub point: RationalPoint,
    /// Facets of the polytope before the step that contain the face.
    pub h_f: Vec<usize>,
    /// Facets meeting the face in a nonempty proper face.
    pub h_f_minus: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PullStep {
    pub j: usize,
    /// Denominator that produced a valid step.
    pub q: u64,
    pub points: Vec<PulledPoint>,
}

/// Splits the facets of `current` into those containing the face spanned
/// by `face_vertices` and those meeting it in a nonempty proper face.
pub fn hyperplane_sets(current: &GeometricPolytope, face_vertices: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut key: Vec<u32> = face_vertices.iter().map(|&v| 1 + v as u32).collect();
    key.sort_unstable();
    if key.is_empty() || !current.lattice.vertex_sets().contains(&key) {
        return Err(Error::Validation(format!("{face_vertices:?} is not a face of the current polytope")));
    }
    let mut h_f = Vec::new();
    let mut h_f_minus = Vec::new();
    for (i, f) in current.facets.iter().enumerate() {
        let on = face_vertices.iter().filter(|v| f.vertices.binary_search(v).is_ok()).count();
        if on == face_vertices.len() {
            h_f.push(i);
        } else if on > 0 {
            h_f_minus.push(i);
        }
    }
    Ok((h_f, h_f_minus))
}

/// Isomorphism certificate between two lattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceCertificate {
    pub isomorphic: bool,
    /// Pairs `[face of a, face of b]` in increasing order of the first.
    pub map: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl EquivalenceCertificate {
    fn failure(witness: String) -> Self {
        EquivalenceCertificate {
            isomorphic: false,
            map: Vec::new(),
            witness: Some(witness),
        }
    }
}

/// Checks that `vertex_map` (vertex index of `a` ↦ vertex index of `b`)
/// induces a lattice isomorphism. Faces are matched through their vertex
/// sets and every cover relation is verified in both directions.
pub fn equivalence_check(a: &FaceLattice, b: &FaceLattice, vertex_map: &[u32]) -> EquivalenceCertificate {
    if a.rank() != b.rank() {
        return EquivalenceCertificate::failure(format!("ranks differ: {} and {}", a.rank(), b.rank()));
    }
    if a.f_vector() != b.f_vector() {
        return EquivalenceCertificate::failure(format!("f-vectors differ: {:?} and {:?}", a.f_vector(), b.f_vector()));
    }
    let n = a.faces_of_rank(0).count();
    if vertex_map.len() != n || vertex_map.iter().any(|&v| v as usize >= n) {
        return EquivalenceCertificate::failure(format!("vertex map is not a map on {n} vertices"));
    }
    let sa = a.vertex_sets();
    let sb = b.vertex_sets();
    let index: HashMap<(i32, &[u32]), usize> = (0..b.len()).map(|y| ((b.face_rank(y), sb[y].as_slice()), y)).collect();
    if index.len() != b.len() {
        return EquivalenceCertificate::failure("faces of the second lattice share vertex sets".into());
    }
    let mut map = vec![0usize; a.len()];
    let mut hit = HashSet::new();
    for x in 0..a.len() {
        let mut img: Vec<u32> = sa[x].iter().map(|&v| 1 + vertex_map[v as usize - 1]).collect();
        img.sort_unstable();
        let Some(&y) = index.get(&(a.face_rank(x), img.as_slice())) else {
            return EquivalenceCertificate::failure(format!("face {x} (vertices {:?}) has no image", sa[x]));
        };
        if !hit.insert(y) {
            return EquivalenceCertificate::failure(format!("face {x} collides at image {y}"));
        }
        map[x] = y;
    }
    for x in 0..a.len() {
        let down = b.covers(map[x]);
        if down.len() != a.covers(x).len() {
            return EquivalenceCertificate::failure(format!(
                "face {x} covers {} faces but its image {} covers {}",
                a.covers(x).len(),
                map[x],
                down.len()
            ));
        }
        if let Some(&c) = a.covers(x).iter().find(|&&c| !down.contains(&(map[c as usize] as u32))) {
            return EquivalenceCertificate::failure(format!("cover ({x}, {c}) is not preserved"));
        }
    }
    EquivalenceCertificate {
        isomorphic: true,
        map: map.iter().enumerate().map(|(x, &y)| [x, y]).collect(),
        witness: None,
    }
}

/// Output of [`pull_realize`].
#[derive(Clone, Debug)]
pub struct Realization {
    /// The input, projected onto its affine hull and centred at the origin.
    pub source: GeometricPolytope,
    pub result: GeometricPolytope,
    /// Source face id of each result vertex, increasing.
    pub origins: Vec<usize>,
    pub steps: Vec<PullStep>,
    /// `bd(result) ≅ C(source)`, with the order-complex lattice on the right.
    pub certificate: EquivalenceCertificate,
}

struct Puller<'a> {
    source: &'a GeometricPolytope,
    source_sets: Vec<Vec<u32>>,
    current: GeometricPolytope,
    origins: Vec<usize>,
    opts: &'a RealizeOptions,
}

impl<'a> Puller<'a> {
    fn new(source: &'a GeometricPolytope, opts: &'a RealizeOptions) -> Self {
        let n = source.vertices.len();
        Puller {
            source,
            source_sets: source.lattice.vertex_sets(),
            current: source.clone(),
            origins: (1..=n).collect(),
            opts,
        }
    }

    fn face_vertices(&self, face: usize) -> Vec<usize> {
        self.source_sets[face].iter().map(|&v| v as usize - 1).collect()
    }

    /// Replaces the rank-`j` faces of the source by pulled centroids.
    fn step(&mut self, j: usize) -> Result<PullStep> {
        let faces: Vec<usize> = self.source.lattice.faces_of_rank(j as i32).collect();
        let mut rays = Vec::with_capacity(faces.len());
        for &face in &faces {
            let verts = self.face_vertices(face);
            let refs: Vec<&RationalPoint> = verts.iter().map(|&v| &self.source.vertices[v]).collect();
            let b = RationalPoint::centroid(&refs);
            let (h_f, h_f_minus) = hyperplane_sets(&self.current, &verts)?;
            let mut t_below: Option<BigRational> = None;
            for (i, f) in self.current.facets.iter().enumerate() {
                let ab = b.dot(&f.normal);
                if h_f.binary_search(&i).is_ok() {
                    if ab != f.offset {
                        return Err(Error::Integrity(format!("centroid of face {face} is off facet {i}")));
                    }
                } else if ab.is_positive() {
                    let bound = &f.offset / &ab;
                    if bound <= BigRational::one() {
                        return Err(Error::Integrity(format!("empty pulling interval for face {face} at facet {i}")));
                    }
                    if t_below.as_ref().map_or(true, |t| bound < *t) {
                        t_below = Some(bound);
                    }
                }
            }
            let span = t_below.map_or_else(BigRational::one, |t| t - BigRational::one());
            rays.push((face, b, span, h_f, h_f_minus));
        }

        let mut last_failure = String::new();
        let mut q = 2u64;
        while q <= self.opts.q_max {
            let denom = BigRational::from_integer(q.into());
            let points: Vec<PulledPoint> = rays
                .iter()
                .map(|(face, b, span, h_f, h_f_minus)| {
                    let t = BigRational::one() + span / &denom;
                    PulledPoint {
                        face: *face,
                        point: b.scale(&t),
                        t,
                        h_f: h_f.clone(),
                        h_f_minus: h_f_minus.clone(),
                    }
                })
                .collect();
            match self.try_step(j, &points) {
                Ok((next, origins)) => {
                    self.current = next;
                    self.origins = origins;
                    return Ok(PullStep { j, q, points });
                }
                Err(Error::Resource { stage, detail }) => return Err(Error::Resource { stage, detail }),
                Err(e) => last_failure = e.to_string(),
            }
            q *= 2;
        }
        Err(Error::resource(
            "realize",
            format!("no valid placement for rank {j} up to q = {}: {last_failure}", self.opts.q_max),
        ))
    }

    fn try_step(&self, j: usize, points: &[PulledPoint]) -> Result<(GeometricPolytope, Vec<usize>)> {
        for (x, p) in points.iter().enumerate() {
            for r in &points[x + 1..] {
                if !self.current.segment_meets_interior(&p.point, &r.point) {
                    return Err(Error::Integrity(format!(
                        "segment between pulled points of faces {} and {} misses the interior",
                        p.face, r.face
                    )));
                }
            }
        }
        let mut merged: Vec<(usize, RationalPoint)> = self
            .origins
            .iter()
            .copied()
            .zip(self.current.vertices.iter().cloned())
            .chain(points.iter().map(|p| (p.face, p.point.clone())))
            .collect();
        merged.sort_by_key(|&(f, _)| f);
        let origins: Vec<usize> = merged.iter().map(|&(f, _)| f).collect();
        let next = GeometricPolytope::from_points_with_cap(
            merged.into_iter().map(|(_, p)| p).collect(),
            self.opts.max_points,
        )?;

        let rank_of = |f: usize| self.source.lattice.face_rank(f) as usize;
        for (fi, f) in next.facets.iter().enumerate() {
            let pulled = f.vertices.iter().filter(|&&v| rank_of(origins[v]) == j).count();
            if pulled != 1 {
                return Err(Error::Integrity(format!("facet {fi} holds {pulled} newly pulled points")));
            }
        }
        let present: HashSet<Vec<u32>> = next.lattice.vertex_sets().into_iter().collect();
        for g in 1..self.source.lattice.len() {
            let r = self.source.lattice.face_rank(g);
            if r < 0 || r as usize > j {
                continue;
            }
            let is_face = present.contains(&self.source_sets[g]);
            if (r as usize) < j && !is_face {
                return Err(Error::Integrity(format!("face {g} of rank {r} was lost")));
            }
            if r as usize == j && is_face {
                return Err(Error::Integrity(format!("face {g} of rank {r} survived its pull")));
            }
        }
        Ok((next, origins))
    }
}

/// Projects `p` onto its affine hull and moves its vertex centroid to the
/// origin.
fn normalize(p: &GeometricPolytope) -> Result<GeometricPolytope> {
    let pivots = affine_pivots(&p.vertices);
    let projected: Vec<RationalPoint> = p
        .vertices
        .iter()
        .map(|v| RationalPoint::new(pivots.iter().map(|&c| v.coords[c].clone()).collect()))
        .collect();
    let refs: Vec<&RationalPoint> = projected.iter().collect();
    let c = RationalPoint::centroid(&refs);
    GeometricPolytope::from_points(projected.iter().map(|v| v.sub(&c)).collect())
}

/// Realizes the barycentric subdivision of `bd(p)` as the boundary of a
/// convex polytope and certifies the combinatorial equivalence.
pub fn pull_realize(p: &GeometricPolytope, opts: &RealizeOptions) -> Result<Realization> {
    let k = p.dim();
    if !(2..=MAX_REALIZE_DIM).contains(&k) {
        return Err(Error::Unsupported(format!(
            "realization in dimension {k}; supported range is 2..={MAX_REALIZE_DIM}"
        )));
    }
    let proper = p.lattice.len() - 2;
    if proper > opts.max_points {
        return Err(Error::resource(
            "realize",
            format!("{proper} proper faces exceed the cap of {}", opts.max_points),
        ));
    }
    let source = normalize(p)?;
    let mut puller = Puller::new(&source, opts);
    let mut steps = Vec::with_capacity(k - 1);
    for j in (1..k).rev() {
        steps.push(puller.step(j)?);
    }
    let Puller { current, origins, .. } = puller;
    current.check()?;

    let bsd = barycentric_subdivision(&source.lattice)?;
    let order_complex = bsd.to_lattice()?;
    let bsd_index: HashMap<usize, u32> = bsd.vertices.iter().enumerate().map(|(i, v)| (v.origin, i as u32)).collect();
    let vertex_map: Vec<u32> = origins.iter().map(|f| bsd_index[f]).collect();
    let certificate = equivalence_check(&current.lattice, &order_complex, &vertex_map);
    if !certificate.isomorphic {
        return Err(Error::Certification {
            check: "realization_equivalence".into(),
            witness: certificate.witness.clone().unwrap_or_default(),
        });
    }
    Ok(Realization {
        source,
        result: current,
        origins,
        steps,
        certificate,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PulledPointJson {
    pub face: usize,
    pub t: String,
    pub h_f: usize,
    pub h_f_minus: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PullStepJson {
    pub j: usize,
    pub q: u64,
    pub points: Vec<PulledPointJson>,
}

/// Exact record of a realization.
#[derive(Clone, Debug, Serialize)]
pub struct RealizationJson {
    pub dim: usize,
    pub vertices: Vec<Vec<String>>,
    /// `[source face id, source rank]` per vertex.
    pub origins: Vec<[usize; 2]>,
    pub facets: Vec<Vec<usize>>,
    pub steps: Vec<PullStepJson>,
}

impl Realization {
    pub fn to_json(&self) -> RealizationJson {
        RealizationJson {
            dim: self.result.dim(),
            vertices: self
                .result
                .vertices
                .iter()
                .map(|p| p.coords.iter().map(|c| c.to_string()).collect())
                .collect(),
            origins: self
                .origins
                .iter()
                .map(|&f| [f, self.source.lattice.face_rank(f) as usize])
                .collect(),
            facets: self.result.facets.iter().map(|f| f.vertices.clone()).collect(),
            steps: self
                .steps
                .iter()
                .map(|s| PullStepJson {
                    j: s.j,
                    q: s.q,
                    points: s
                        .points
                        .iter()
                        .map(|p| PulledPointJson {
                            face: p.face,
                            t: p.t.to_string(),
                            h_f: p.h_f.len(),
                            h_f_minus: p.h_f_minus.len(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// OFF mesh of a 3-polytope with triangular facets, oriented outward.
pub fn to_off(p: &GeometricPolytope, precision: usize) -> Result<String> {
    if p.dim() != 3 || p.vertices.first().map_or(true, |v| v.dim() != 3) {
        return Err(Error::Unsupported(format!("OFF output of a {}-polytope", p.dim())));
    }
    let mut out = format!("OFF\n{} {} 0\n", p.vertices.len(), p.facets.len());
    for v in &p.vertices {
        let coords: Vec<String> = v.coords.iter().map(|c| to_decimal(c, precision)).collect();
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    for f in &p.facets {
        let [a, mut b, mut c] = match f.vertices[..] {
            [a, b, c] => [a, b, c],
            _ => return Err(Error::Unsupported(format!("OFF output of a {}-gon facet", f.vertices.len()))),
        };
        let u = p.vertices[b].sub(&p.vertices[a]).coords;
        let w = p.vertices[c].sub(&p.vertices[a]).coords;
        let cross = [
            &u[1] * &w[2] - &u[2] * &w[1],
            &u[2] * &w[0] - &u[0] * &w[2],
            &u[0] * &w[1] - &u[1] * &w[0],
        ];
        let outward: BigRational = cross.iter().zip(&f.normal).map(|(x, n)| x * n).sum();
        if outward.is_negative() {
            std::mem::swap(&mut b, &mut c);
        }
        out.push_str(&format!("3 {a} {b} {c}\n"));
    }
    Ok(out)
}
