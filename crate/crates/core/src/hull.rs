//! Exact rational convex hulls.
//!
//! Facets are enumerated with the double description method on the cone of
//! valid inequalities `{(a, b) : a·p ≤ b for every input point p}`, working
//! in the affine hull of the points. All arithmetic is over `BigInt`; no
//! tolerance is involved anywhere.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::FaceLattice;
use crate::permgroup::PermGroup;

/// Upper bound on the hull dimension accepted by [`hull_lattice`].
pub const MAX_DIM: usize = 7;
/// Upper bound on the number of input points accepted by [`hull_lattice`].
pub const MAX_POINTS: usize = 60;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub coords: Vec<BigRational>,
}

impl RationalPoint {
    pub fn new(coords: Vec<BigRational>) -> Self {
        RationalPoint { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RationalPoint {
            coords: coords.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &[BigRational]) -> BigRational {
        self.coords
            .iter()
            .zip(other)
            .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn sub(&self, other: &RationalPoint) -> RationalPoint {
        RationalPoint::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, t: &BigRational) -> RationalPoint {
        RationalPoint::new(self.coords.iter().map(|a| a * t).collect())
    }

    pub fn lerp(&self, other: &RationalPoint, s: &BigRational) -> RationalPoint {
        RationalPoint::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + (b - a) * s)
                .collect(),
        )
    }

    pub fn centroid(points: &[&RationalPoint]) -> RationalPoint {
        let n = points[0].dim();
        let k = BigRational::from_integer(points.len().into());
        RationalPoint::new(
            (0..n)
                .map(|i| points.iter().fold(BigRational::zero(), |acc, p| acc + &p.coords[i]) / &k)
                .collect(),
        )
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The initial vertex for degree `n + 1`: coordinates proportional to
/// `2^n, 2^(n-1), …, 1`, normalized to sum 1.
///
/// The coordinates are pairwise distinct and strictly decreasing, so the
/// point lies inside the base chamber of the symmetric group's action and
/// has a free orbit.
pub fn initial_vertex(n: usize) -> RationalPoint {
    assert!(n >= 1, "initial vertex needs n ≥ 1");
    let total = (BigInt::one() << (n + 1)) - BigInt::one();
    RationalPoint::new(
        (0..=n)
            .map(|i| BigRational::new(BigInt::one() << (n - i), total.clone()))
            .collect(),
    )
}

/// The orbit `{γ(v)}` in group-element order; `γ(v)` has coordinate `i`
/// equal to `v` at `γ⁻¹(i)`.
pub fn orbit(group: &PermGroup, v: &RationalPoint) -> Result<Vec<RationalPoint>> {
    if v.dim() != group.degree() {
        return Err(Error::Validation(format!(
            "point has {} coordinates but the group has degree {}",
            v.dim(),
            group.degree()
        )));
    }
    let mut sorted = v.coords.clone();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Validation(
            "initial vertex has repeated coordinates; its orbit could collapse".into(),
        ));
    }
    Ok(group
        .elements()
        .iter()
        .map(|g| {
            let mut coords = vec![BigRational::zero(); v.dim()];
            for (i, c) in v.coords.iter().enumerate() {
                coords[g.apply(i)] = c.clone();
            }
            RationalPoint::new(coords)
        })
        .collect())
}

/// Row-reduces `rows` in place and returns the pivot columns.
fn row_reduce(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..cols {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Pivot coordinates of the affine hull: projecting onto them is an affine
/// isomorphism from the affine hull onto `Q^d`.
pub(crate) fn affine_pivots(points: &[RationalPoint]) -> Vec<usize> {
    let mut rows: Vec<Vec<BigRational>> = points[1..].iter().map(|p| p.sub(&points[0]).coords).collect();
    if rows.is_empty() {
        return Vec::new();
    }
    row_reduce(&mut rows)
}

/// Affine dimension of a nonempty point set.
pub fn dimension(points: &[RationalPoint]) -> usize {
    assert!(!points.is_empty(), "dimension of an empty point set");
    affine_pivots(points).len()
}

/// A facet: the points it contains and its inequality `normal·x ≤ offset`.
///
/// The normal lives in the ambient space, zero outside the pivot coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: Vec<BigRational>,
    pub offset: BigRational,
}

impl Facet {
    /// `normal·p − offset`: negative below, zero on, positive above.
    pub fn slack(&self, p: &RationalPoint) -> BigRational {
        p.dot(&self.normal) - &self.offset
    }
}

#[derive(Clone, Debug)]
pub struct ConvexHull {
    pub points: Vec<RationalPoint>,
    pub dim: usize,
    pub facets: Vec<Facet>,
    /// Vertex `i` of the lattice (face id `1 + i`) is `points[i]`.
    pub lattice: FaceLattice,
}

/// Integer homogeneous rows `(Y, −den)` with `y = Y / den` in pivot coordinates.
fn homogeneous_rows(points: &[RationalPoint], pivots: &[usize]) -> Vec<Vec<BigInt>> {
    points
        .iter()
        .map(|p| {
            let den = pivots
                .iter()
                .fold(BigInt::one(), |acc, &c| acc.lcm(p.coords[c].denom()));
            let mut row: Vec<BigInt> = pivots
                .iter()
                .map(|&c| p.coords[c].numer() * (&den / p.coords[c].denom()))
                .collect();
            row.push(-den);
            row
        })
        .collect()
}

fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

#[derive(Clone)]
struct Ray {
    v: Vec<BigInt>,
    zero: Vec<u64>,
}

fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(set: &mut [u64], i: usize) {
    set[i / 64] |= 1 << (i % 64);
}

/// Extreme rays of `{x : rows·x ≤ 0}`, for a pointed cone of dimension
/// `rows[0].len()` whose rows include a basis.
fn double_description(rows: &[Vec<BigInt>]) -> Vec<Ray> {
    let m = rows[0].len();
    let words = rows.len().div_ceil(64);

    // greedy basis of rows
    let mut basis: Vec<usize> = Vec::new();
    let mut reduced: Vec<Vec<BigRational>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if basis.len() == m {
            break;
        }
        let mut trial = reduced.clone();
        trial.push(row.iter().map(|x| BigRational::from_integer(x.clone())).collect());
        if row_reduce(&mut trial).len() > basis.len() {
            basis.push(i);
            reduced = trial;
        }
    }
    assert_eq!(basis.len(), m, "rows must contain a basis");

    // initial simplicial cone: rays are the columns of −B⁻¹
    let mut aug: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|&i| {
            let mut r: Vec<BigRational> = rows[i].iter().map(|x| BigRational::from_integer(x.clone())).collect();
            r.extend((0..m).map(|_| BigRational::zero()));
            r
        })
        .collect();
    for (k, r) in aug.iter_mut().enumerate() {
        r[m + k] = BigRational::one();
    }
    row_reduce(&mut aug);
    let mut rays: Vec<Ray> = (0..m)
        .map(|k| {
            let col: Vec<BigRational> = (0..m).map(|r| -aug[r][m + k].clone()).collect();
            let den = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let mut v: Vec<BigInt> = col.iter().map(|x| x.numer() * (&den / x.denom())).collect();
            normalize(&mut v);
            let mut zero = vec![0u64; words];
            for (j, &b) in basis.iter().enumerate() {
                if j != k {
                    set_bit(&mut zero, b);
                }
            }
            Ray { v, zero }
        })
        .collect();

    let mut processed = vec![false; rows.len()];
    for &b in &basis {
        processed[b] = true;
    }
    for (i, row) in rows.iter().enumerate() {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let vals: Vec<BigInt> = rays.iter().map(|r| dot_int(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        if pos.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k].is_zero() {
                    set_bit(&mut r.zero, i);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<u64> = rays[p].zero.iter().zip(&rays[n].zero).map(|(a, b)| a & b).collect();
                let size: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (size as usize) + 2 < m {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| {
                    k == p || k == n || common.iter().zip(&r.zero).any(|(c, z)| c & !z != 0)
                });
                if !adjacent {
                    continue;
                }
                let mut v: Vec<BigInt> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xn, xp)| &vals[p] * xn - &vals[n] * xp)
                    .collect();
                normalize(&mut v);
                let mut zero = common;
                set_bit(&mut zero, i);
                fresh.push(Ray { v, zero });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k].is_positive() {
                continue;
            }
            if vals[k].is_zero() {
                set_bit(&mut r.zero, i);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }
    rays
}

/// Computes the facets and face lattice of `conv(points)`, certifying that
/// every input point is a vertex.
pub fn hull_lattice(points: &[RationalPoint]) -> Result<ConvexHull> {
    hull_lattice_with_caps(points, MAX_DIM, MAX_POINTS)
}

pub fn hull_lattice_with_caps(points: &[RationalPoint], max_dim: usize, max_points: usize) -> Result<ConvexHull> {
    if points.is_empty() {
        return Err(Error::Validation("hull of an empty point set".into()));
    }
    if points.len() > max_points {
        return Err(Error::resource("hull", format!("{} points exceed the cap of {max_points}", points.len())));
    }
    let ambient = points[0].dim();
    if points.iter().any(|p| p.dim() != ambient) {
        return Err(Error::Validation("points have different dimensions".into()));
    }
    let mut sorted: Vec<&RationalPoint> = points.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Validation("repeated input point".into()));
    }
    let pivots = affine_pivots(points);
    let dim = pivots.len();
    if dim > max_dim {
        return Err(Error::resource("hull", format!("dimension {dim} exceeds the cap of {max_dim}")));
    }
    if dim == 0 {
        return Ok(ConvexHull {
            points: points.to_vec(),
            dim,
            facets: Vec::new(),
            lattice: FaceLattice::point(),
        });
    }
    let rows = homogeneous_rows(points, &pivots);
    let rays = double_description(&rows);
    let mut facets: Vec<Facet> = rays
        .into_iter()
        .map(|ray| {
            let vertices: Vec<usize> = (0..points.len()).filter(|&i| bit(&ray.zero, i)).collect();
            let mut normal = vec![BigRational::zero(); ambient];
            for (k, &c) in pivots.iter().enumerate() {
                normal[c] = BigRational::from_integer(ray.v[k].clone());
            }
            Facet {
                vertices,
                normal,
                offset: BigRational::from_integer(ray.v[dim].clone()),
            }
        })
        .collect();
    facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    let incidences: Vec<Vec<usize>> = facets.iter().map(|f| f.vertices.clone()).collect();
    let lattice = FaceLattice::from_facets(points.len(), &incidences).map_err(|e| match e {
        Error::Structural(msg) => Error::Integrity(format!("hull vertex certification: {msg}")),
        other => other,
    })?;
    if lattice.rank() != dim as i32 {
        return Err(Error::Integrity(format!(
            "hull lattice has rank {} but the points span dimension {dim}",
            lattice.rank()
        )));
    }
    Ok(ConvexHull {
        points: points.to_vec(),
        dim,
        facets,
        lattice,
    })
}

/// Facet vertex sets by brute force over all affinely independent
/// `d`-subsets: the independent oracle for [`hull_lattice`].
pub fn brute_force_facets(points: &[RationalPoint]) -> Vec<Vec<usize>> {
    let pivots = affine_pivots(points);
    let d = pivots.len();
    if d == 0 {
        return Vec::new();
    }
    let proj: Vec<Vec<BigRational>> = points
        .iter()
        .map(|p| pivots.iter().map(|&c| p.coords[c].clone()).collect())
        .collect();
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        if let Some(normal) = hyperplane_normal(&proj, &subset) {
            let offset = dot(&normal, &proj[subset[0]]);
            let slacks: Vec<BigRational> = proj.iter().map(|p| dot(&normal, p) - &offset).collect();
            let above = slacks.iter().any(|s| s.is_positive());
            let below = slacks.iter().any(|s| s.is_negative());
            if !(above && below) {
                let on: Vec<usize> = (0..points.len()).filter(|&i| slacks[i].is_zero()).collect();
                if !found.contains(&on) {
                    found.push(on);
                }
            }
        }
        // next combination
        let n = points.len();
        let mut i = d;
        loop {
            if i == 0 {
                found.sort();
                return found;
            }
            i -= 1;
            if subset[i] < n - d + i {
                subset[i] += 1;
                for j in i + 1..d {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Normal of the hyperplane through the chosen points via cofactor
/// expansion, or `None` when they are affinely dependent.
fn hyperplane_normal(proj: &[Vec<BigRational>], subset: &[usize]) -> Option<Vec<BigRational>> {
    let d = proj[0].len();
    let base = &proj[subset[0]];
    let diffs: Vec<Vec<BigRational>> = subset[1..]
        .iter()
        .map(|&i| proj[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let normal: Vec<BigRational> = (0..d)
        .map(|col| {
            let minor: Vec<Vec<BigRational>> = diffs
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, x)| x.clone()).collect())
                .collect();
            let det = determinant(minor);
            if col % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect();
    if normal.iter().all(Zero::is_zero) {
        None
    } else {
        Some(normal)
    }
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            if !m[r][c].is_zero() {
                let f = &m[r][c] / &m[c][c];
                for j in c..n {
                    let delta = &f * &m[c][j];
                    m[r][j] -= delta;
                }
            }
        }
    }
    det
}

/// The orbit polytope: hull of a free group orbit, vertex `i` ↔ element `i`.
#[derive(Clone, Debug)]
pub struct OrbitPolytope {
    pub hull: ConvexHull,
    pub vertex_to_group: Vec<usize>,
}

impl OrbitPolytope {
    pub fn dim(&self) -> usize {
        self.hull.dim
    }

    pub fn lattice(&self) -> &FaceLattice {
        &self.hull.lattice
    }

    pub fn points(&self) -> &[RationalPoint] {
        &self.hull.points
    }
}

/// Hull of the orbit of the initial vertex for `degree − 1`.
pub fn orbit_polytope(group: &PermGroup) -> Result<OrbitPolytope> {
    if group.degree() < 2 {
        return Err(Error::Unsupported("orbit polytope needs degree at least 2".into()));
    }
    let v = initial_vertex(group.degree() - 1);
    let points = orbit(group, &v)?;
    let hull = hull_lattice(&points)?;
    Ok(OrbitPolytope {
        vertex_to_group: (0..points.len()).collect(),
        hull,
    })
}

/// Points file: `{"dim_ambient": n, "points": [["num/den", ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsJson {
    pub dim_ambient: usize,
    pub points: Vec<Vec<String>>,
}

impl PointsJson {
    pub fn from_points(points: &[RationalPoint]) -> Self {
        PointsJson {
            dim_ambient: points.first().map_or(0, RationalPoint::dim),
            points: points
                .iter()
                .map(|p| p.coords.iter().map(|c| c.to_string()).collect())
                .collect(),
        }
    }

    pub fn to_points(&self) -> Result<Vec<RationalPoint>> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() != self.dim_ambient {
                    return Err(Error::Validation(format!(
                        "point {i} has {} coordinates, expected {}",
                        row.len(),
                        self.dim_ambient
                    )));
                }
                row.iter()
                    .map(|s| {
                        BigRational::from_str(s.trim())
                            .map_err(|_| Error::Validation(format!("point {i}: bad rational `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(RationalPoint::new)
            })
            .collect()
    }
}

/// Decimal rendering of an exact rational, rounded half away from zero.
pub fn to_decimal(x: &BigRational, precision: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), precision);
    let scaled = x * BigRational::from_integer(scale.clone());
    let half = rat(1, 2);
    let rounded = if scaled.is_negative() {
        -((-scaled) + half).floor()
    } else {
        (scaled + half).floor()
    }
    .to_integer();
    let negative = rounded.is_negative();
    let digits = rounded.abs().to_string();
    let digits = if digits.len() <= precision {
        format!("{}{}", "0".repeat(precision + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = digits.split_at(digits.len() - precision);
    let sign = if negative { "-" } else { "" };
    if precision == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}
