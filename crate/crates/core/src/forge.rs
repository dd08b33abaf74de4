//! Assembly of a polytope with a prescribed automorphism group.
//!
//! Small and special groups get explicit polytopes (point, segment, wheels,
//! polygons). Every other group acts simply transitively on the vertices of
//! its orbit polytope `Q`; the chambers of the barycentric subdivision
//! `C(Q)` are decorated with complexes whose vertex valencies pin down the
//! type of every `C(Q)` vertex, and the decoration is transported by `Γ`
//! so that `Γ` acts on the result.

use std::collections::HashMap;

use serde::Serialize;

use crate::autgroup::{verify_abstract, verify_construction_with, EngineOptions, VerificationResult};
use crate::complex::CellComplex;
use crate::diagrams::{decorate_simplex, next_admissible, simplicial_diagram, simplicial_polytope, DecoratedSimplex};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::hull::{orbit_polytope, MAX_DIM};
use crate::lattice::{barycentric_subdivision, FaceLattice, LabelledComplex, DEFAULT_FLAG_CAP};
use crate::permgroup::{classify, GroupClass, PermGroup};

#[derive(Clone, Copy, Debug)]
pub struct ForgeOptions {
    /// Send dihedral groups through the general pipeline.
    pub force_general: bool,
    /// Flag cap for exhaustive strong flag-connectivity checks.
    pub max_flags: usize,
    /// Cap on the number of proper faces of the assembled polytope.
    pub max_faces: usize,
    /// Cap on the number of chambers of `C(Q)`.
    pub max_chambers: usize,
    /// Run the automorphism certification.
    pub certify: bool,
}

impl Default for ForgeOptions {
    fn default() -> Self {
        ForgeOptions {
            force_general: false,
            max_flags: DEFAULT_FLAG_CAP,
            max_faces: 500_000,
            max_chambers: 2_000,
            certify: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Point,
    Segment,
    Wheel,
    Polygon,
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeStats {
    pub ty: usize,
    pub count: usize,
    pub s_min: usize,
    pub s_max: usize,
    pub val_min: usize,
    pub val_max: usize,
}

/// The bound `m`, the apex valencies `m_i` and the valency intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValencyPlan {
    pub d: usize,
    pub m: usize,
    pub m_by_type: Vec<usize>,
    /// `[a_i, b_i]` for each type `i`.
    pub intervals: Vec<[usize; 2]>,
    pub s_stats: Vec<TypeStats>,
    /// Vertex count of the cyclic polytope glued into each base-star chamber.
    pub l_vertex_counts: Vec<usize>,
}

impl ValencyPlan {
    /// Checks `m < a_{d-1} ≤ b_{d-1} < a_{d-2} ≤ … < a_0 ≤ b_0`.
    pub fn chain_holds(&self) -> bool {
        let mut prev = self.m;
        for j in (0..self.d).rev() {
            let [a, b] = self.intervals[j];
            if !(prev < a && a <= b) {
                return false;
            }
            prev = b;
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValencyEvidence {
    pub ty: usize,
    pub interval: [usize; 2],
    pub measured_min: usize,
    pub measured_max: usize,
}

/// Post-assembly valency audit by direct edge count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValencyCheck {
    pub cq_vertices: usize,
    /// `C(Q)` vertices whose measured valency equals the prediction.
    pub cq_matching: usize,
    pub other_vertices: usize,
    pub other_matching: usize,
    pub max_other: usize,
    pub by_type: Vec<ValencyEvidence>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub f_vector: Vec<usize>,
    pub flags: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chambers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_f_vector: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub branch: Branch,
    pub d: usize,
    pub group_order: usize,
    pub group_class: GroupClass,
    pub counts: Counts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<ValencyPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valencies: Option<ValencyCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationResult>,
    pub notes: Vec<String>,
}

/// A built polytope. In the general branch the first vertices of the
/// lattice are the vertices of `C(Q)` in subdivision order, so face `1 + i`
/// is vertex `i` of the barycentric subdivision of the orbit polytope.
#[derive(Clone, Debug)]
pub struct Construction {
    pub lattice: FaceLattice,
    pub report: ConstructionReport,
    /// Face permutation of every group element, when the branch has one.
    pub action: Option<Vec<Vec<u32>>>,
}

impl Construction {
    pub fn certified(&self) -> bool {
        self.report.verification.as_ref().is_some_and(|v| v.certified)
    }
}

/// Polyhedron with automorphism group `C_k`. A hub `z` is coned over a
/// rim `k`-cycle; each rim edge carries a quadrilateral and a triangle
/// that lean the same way around an outer ring, and a second hub `w`
/// caps the ring with quadrilaterals. Every vertex of valency 3 on the
/// ring sees three distinguishable faces in the same rotational order,
/// so no reflection survives.
pub fn wheel_polyhedron(k: usize) -> Result<FaceLattice> {
    if k < 3 {
        return Err(Error::Validation(format!("wheel needs k ≥ 3, got {k}")));
    }
    let k32 = k as u32;
    let (z, w) = (0u32, 1u32);
    let c = |i: usize| 2 + (i % k) as u32;
    let d = |i: usize| 2 + k32 + (i % k) as u32;
    let e = |i: usize| 2 + 2 * k32 + (i % k) as u32;
    let mut cells: Vec<(i32, Vec<u32>)> = Vec::new();
    for i in 0..k {
        for edge in [[z, c(i)], [c(i), c(i + 1)], [c(i), d(i)], [d(i), e(i)], [c(i + 1), e(i)], [e(i), d(i + 1)], [w, e(i)]] {
            cells.push((1, edge.to_vec()));
        }
        cells.push((2, vec![z, c(i), c(i + 1)]));
        cells.push((2, vec![c(i), c(i + 1), e(i), d(i)]));
        cells.push((2, vec![c(i + 1), d(i + 1), e(i)]));
        cells.push((2, vec![w, e(i + k - 1), d(i), e(i)]));
    }
    FaceLattice::from_vertex_sets(3, 2 + 3 * k, cells)
}

/// Valency and chamber count of every `C(Q)` vertex.
fn cq_vertex_stats(cq: &LabelledComplex) -> (Vec<usize>, Vec<usize>) {
    let n = cq.vertices.len();
    let mut val = vec![0; n];
    let mut s = vec![0; n];
    for cell in &cq.cells {
        if cell.dim == 1 {
            for &v in &cell.vertices {
                val[v as usize] += 1;
            }
        }
        if cell.dim == cq.dim {
            for &v in &cell.vertices {
                s[v as usize] += 1;
            }
        }
    }
    (val, s)
}

/// Largest valency of a decoration vertex that is not an outer vertex, in
/// closed form from the families.
fn decoration_bound(d: usize, l_counts: &[usize]) -> Result<usize> {
    let mut m = d;
    for &v in l_counts {
        let l = simplicial_polytope(v, d)?;
        let diagram = simplicial_diagram(v, d)?;
        for (local, &src) in diagram.origin.iter().enumerate() {
            let val = l.valency(src as usize + 1);
            let final_val = if local < d { val + 2 * (d - 1) } else { val };
            m = m.max(final_val);
        }
    }
    Ok(m)
}

/// Chooses `m` and the apex valencies `m_d−1, …, m_0` so that the valency
/// intervals of the vertex types are disjoint and above `m`.
pub fn plan_valencies(cq: &LabelledComplex, l_counts: &[usize]) -> Result<ValencyPlan> {
    let d = cq.dim + 1;
    let m = decoration_bound(d, l_counts)?;
    let (val, s) = cq_vertex_stats(cq);
    let mut m_by_type = vec![0; d];
    let mut intervals = vec![[0, 0]; d];
    let mut s_stats = Vec::with_capacity(d);
    for ty in 0..d {
        let xs: Vec<usize> = (0..cq.vertices.len()).filter(|&x| cq.vertices[x].ty == ty).collect();
        if xs.is_empty() {
            return Err(Error::Integrity(format!("C(Q) has no vertex of type {ty}")));
        }
        s_stats.push(TypeStats {
            ty,
            count: xs.len(),
            s_min: xs.iter().map(|&x| s[x]).min().unwrap(),
            s_max: xs.iter().map(|&x| s[x]).max().unwrap(),
            val_min: xs.iter().map(|&x| val[x]).min().unwrap(),
            val_max: xs.iter().map(|&x| val[x]).max().unwrap(),
        });
    }
    let mut bound = m;
    for j in (0..d).rev() {
        let xs: Vec<usize> = (0..cq.vertices.len()).filter(|&x| cq.vertices[x].ty == j).collect();
        let lo = |mj: usize| xs.iter().map(|&x| val[x] + s[x] * mj).min().unwrap();
        let hi = |mj: usize| xs.iter().map(|&x| val[x] + s[x] * mj).max().unwrap();
        let mut mj = next_admissible(d, d);
        while lo(mj) <= bound {
            mj = next_admissible(mj + 1, d);
        }
        m_by_type[j] = mj;
        intervals[j] = [lo(mj), hi(mj)];
        bound = hi(mj);
    }
    let plan = ValencyPlan {
        d,
        m,
        m_by_type,
        intervals,
        s_stats,
        l_vertex_counts: l_counts.to_vec(),
    };
    if !plan.chain_holds() {
        return Err(Error::Integrity("valency intervals are not a disjoint chain".into()));
    }
    Ok(plan)
}

/// Provenance of a vertex of the assembled polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// A vertex of `C(Q)`.
    Cq(u32),
    /// Local vertex `local` of the decoration of chamber `chamber`.
    Interior { chamber: u32, local: u32 },
}

/// `C(Q)` with every chamber replaced by its decoration.
#[derive(Clone, Debug)]
pub struct DecoratedComplex {
    pub complex: CellComplex,
    pub provenance: Vec<Provenance>,
    pub predicted: Vec<usize>,
    /// First global id of each chamber's interior vertices.
    pub interior_start: Vec<u32>,
    /// Base-star template index of each chamber.
    pub template_of: Vec<usize>,
}

/// The general pipeline's intermediate state.
pub struct Scaffold {
    pub d: usize,
    pub q: FaceLattice,
    pub cq: LabelledComplex,
    /// `face_act[g][f]`: image of face `f` of `Q` under element `g`.
    pub face_act: Vec<Vec<u32>>,
    /// Chamber cell ids in chamber order.
    pub chambers: Vec<u32>,
    pub chamber_index: HashMap<u32, usize>,
    /// Chamber indices of the star of the identity's vertex.
    pub base_star: Vec<usize>,
}

impl Scaffold {
    pub fn new(group: &PermGroup, opts: &ForgeOptions) -> Result<Self> {
        if group.degree() > MAX_DIM + 1 && group.order() > MAX_DIM + 1 {
            return Err(Error::resource("orbit", format!("degree {} exceeds the hull cap", group.degree())));
        }
        let orbit = orbit_polytope(group)?;
        let d = orbit.dim();
        let q = orbit.hull.lattice;
        let flags = q.flags()?.len();
        if flags > opts.max_chambers {
            return Err(Error::resource(
                "decorate",
                format!("C(Q) would have {flags} chambers (cap {}); Q has dimension {d}", opts.max_chambers),
            ));
        }
        let cq = barycentric_subdivision(&q)?;
        let sets = q.vertex_sets();
        let index: HashMap<&[u32], u32> = sets
            .iter()
            .enumerate()
            .filter(|(f, _)| q.face_rank(*f) >= 0)
            .map(|(f, s)| (s.as_slice(), f as u32))
            .collect();
        let least = q.least().expect("bounded");
        let face_act: Vec<Vec<u32>> = (0..group.order())
            .map(|g| {
                (0..q.len())
                    .map(|f| {
                        if f == least {
                            return f as u32;
                        }
                        let mut img: Vec<u32> = sets[f].iter().map(|&v| 1 + group.mul(g, v as usize - 1) as u32).collect();
                        img.sort_unstable();
                        index[img.as_slice()]
                    })
                    .collect()
            })
            .collect();
        let chambers = cq.chambers.clone();
        let chamber_index: HashMap<u32, usize> = chambers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let v0 = cq.vertex_of_face(1).expect("vertex of the identity");
        let base_star: Vec<usize> = (0..chambers.len())
            .filter(|&i| cq.cells[chambers[i] as usize].vertices[0] == v0)
            .collect();
        Ok(Scaffold {
            d,
            q,
            cq,
            face_act,
            chambers,
            chamber_index,
            base_star,
        })
    }

    pub fn chamber_vertices(&self, chamber: usize) -> &[u32] {
        &self.cq.cells[self.chambers[chamber] as usize].vertices
    }

    /// Image of a `C(Q)` vertex under element `g`.
    pub fn act_vertex(&self, g: usize, v: u32) -> u32 {
        let f = self.cq.vertices[v as usize].origin;
        self.cq.vertex_of_face(self.face_act[g][f] as usize).expect("proper face")
    }

    /// Image of a chamber under element `g`.
    pub fn act_chamber(&self, g: usize, chamber: usize) -> usize {
        let img: Vec<u32> = self.chamber_vertices(chamber).iter().map(|&v| self.act_vertex(g, v)).collect();
        let cell = self.cq.cell_id(&img).expect("chambers map to chambers");
        self.chamber_index[&cell]
    }

    /// Group element whose vertex of `Q` is the type-0 vertex of `chamber`.
    pub fn chamber_element(&self, chamber: usize) -> usize {
        let v = self.chamber_vertices(chamber)[0];
        self.cq.vertices[v as usize].origin - 1
    }
}

/// Decorates every chamber by the template of its base-star preimage.
pub fn decorate(sc: &Scaffold, group: &PermGroup, templates: &[DecoratedSimplex], plan: &ValencyPlan) -> Result<DecoratedComplex> {
    let d = sc.d;
    let base_pos: HashMap<usize, usize> = sc.base_star.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut complex = CellComplex::new(d - 1);
    complex.add_vertices(sc.cq.vertices.len());
    for cell in &sc.cq.cells {
        if cell.dim >= 1 && cell.dim < d - 1 {
            complex.insert(cell.dim, cell.vertices.clone())?;
        }
    }
    let (val, s) = cq_vertex_stats(&sc.cq);
    let mut provenance: Vec<Provenance> = (0..sc.cq.vertices.len() as u32).map(Provenance::Cq).collect();
    let mut predicted: Vec<usize> = (0..sc.cq.vertices.len())
        .map(|x| val[x] + s[x] * plan.m_by_type[sc.cq.vertices[x].ty])
        .collect();
    let mut interior_start = Vec::with_capacity(sc.chambers.len());
    let mut template_of = Vec::with_capacity(sc.chambers.len());
    for ch in 0..sc.chambers.len() {
        let gamma = sc.chamber_element(ch);
        let pre = sc.act_chamber(group.inv(gamma), ch);
        let idx = *base_pos
            .get(&pre)
            .ok_or_else(|| Error::Integrity(format!("chamber {ch} transports outside the base star")))?;
        let t = &templates[idx];
        let outer = sc.chamber_vertices(ch);
        for (i, &w) in outer.iter().enumerate() {
            if sc.cq.vertices[w as usize].ty != i {
                return Err(Error::Integrity(format!("chamber {ch} is not type-ordered")));
            }
        }
        let mut map: Vec<u32> = outer.to_vec();
        interior_start.push(complex.n_vertices() as u32);
        for local in d..t.diagram.complex.n_vertices() {
            map.push(complex.add_vertex());
            provenance.push(Provenance::Interior {
                chamber: ch as u32,
                local: local as u32,
            });
            predicted.push(t.predicted[local]);
        }
        for dim in 1..d {
            for c in t.diagram.complex.cells(dim) {
                complex.insert(dim, c.iter().map(|&v| map[v as usize]).collect())?;
            }
        }
        template_of.push(idx);
    }
    Ok(DecoratedComplex {
        complex,
        provenance,
        predicted,
        interior_start,
        template_of,
    })
}

/// Closes the decorated complex into the face lattice of the polytope.
pub fn complete_polytope(dc: &DecoratedComplex, flag_cap: usize) -> Result<FaceLattice> {
    dc.complex.check_pseudomanifold(None)?;
    let lattice = dc.complex.to_lattice()?;
    let report = lattice.validate_with(flag_cap);
    if let Some(fail) = report.first_failure() {
        return Err(Error::Integrity(format!(
            "assembled polytope fails {}: {}",
            fail.name,
            fail.witness.clone().unwrap_or_default()
        )));
    }
    Ok(lattice)
}

/// Vertex permutation of the assembled complex for every group element.
pub fn vertex_action(sc: &Scaffold, dc: &DecoratedComplex, group: &PermGroup) -> Vec<Vec<u32>> {
    (0..group.order())
        .map(|g| {
            dc.provenance
                .iter()
                .map(|p| match *p {
                    Provenance::Cq(v) => sc.act_vertex(g, v),
                    Provenance::Interior { chamber, local } => {
                        let img = sc.act_chamber(g, chamber as usize);
                        dc.interior_start[img] + local - sc.d as u32
                    }
                })
                .collect()
        })
        .collect()
}

/// Lifts vertex permutations to face permutations through vertex sets.
pub fn face_action(lattice: &FaceLattice, vertex_perms: &[Vec<u32>]) -> Result<Vec<Vec<u32>>> {
    let sets = lattice.vertex_sets();
    let least = lattice.least().expect("bounded");
    let greatest = lattice.greatest().expect("bounded");
    let index: HashMap<&[u32], u32> = sets
        .iter()
        .enumerate()
        .filter(|&(f, _)| f != least && f != greatest)
        .map(|(f, s)| (s.as_slice(), f as u32))
        .collect();
    vertex_perms
        .iter()
        .map(|vp| {
            (0..lattice.len())
                .map(|f| {
                    if f == least || f == greatest {
                        return Ok(f as u32);
                    }
                    let mut img: Vec<u32> = sets[f].iter().map(|&v| 1 + vp[v as usize - 1]).collect();
                    img.sort_unstable();
                    index
                        .get(img.as_slice())
                        .copied()
                        .ok_or_else(|| Error::Integrity(format!("face {f} has no image under the group action")))
                })
                .collect()
        })
        .collect()
}

/// Compares predicted valencies with edge counts in the final lattice.
pub fn check_valencies(lattice: &FaceLattice, dc: &DecoratedComplex, sc: &Scaffold, plan: &ValencyPlan) -> ValencyCheck {
    let n_cq = sc.cq.vertices.len();
    let measured: Vec<usize> = (0..dc.provenance.len()).map(|v| lattice.valency(v + 1)).collect();
    let cq_matching = (0..n_cq).filter(|&v| measured[v] == dc.predicted[v]).count();
    let other_matching = (n_cq..measured.len()).filter(|&v| measured[v] == dc.predicted[v]).count();
    let max_other = measured[n_cq..].iter().copied().max().unwrap_or(0);
    let by_type: Vec<ValencyEvidence> = (0..sc.d)
        .map(|ty| {
            let vals: Vec<usize> = (0..n_cq).filter(|&v| sc.cq.vertices[v].ty == ty).map(|v| measured[v]).collect();
            ValencyEvidence {
                ty,
                interval: plan.intervals[ty],
                measured_min: *vals.iter().min().unwrap(),
                measured_max: *vals.iter().max().unwrap(),
            }
        })
        .collect();
    let in_intervals = by_type
        .iter()
        .all(|e| e.interval[0] <= e.measured_min && e.measured_max <= e.interval[1]);
    let pass = cq_matching == n_cq && other_matching == measured.len() - n_cq && max_other <= plan.m && in_intervals;
    ValencyCheck {
        cq_vertices: n_cq,
        cq_matching,
        other_vertices: measured.len() - n_cq,
        other_matching,
        max_other,
        by_type,
        pass,
    }
}

fn counts(lattice: &FaceLattice, flags: usize) -> Counts {
    Counts {
        f_vector: lattice.f_vector(),
        flags,
        chambers: None,
        q_f_vector: None,
    }
}

fn special(branch: Branch, lattice: FaceLattice, group: &PermGroup, class: GroupClass, opts: &ForgeOptions, notes: Vec<String>) -> Result<Construction> {
    let report = lattice.validate_with(opts.max_flags);
    if let Some(fail) = report.first_failure() {
        return Err(Error::Integrity(format!("{} fails {}", branch_name(branch), fail.name)));
    }
    let verification = if opts.certify {
        Some(verify_abstract(&lattice, &class, group.order())?)
    } else {
        None
    };
    Ok(Construction {
        report: ConstructionReport {
            branch,
            d: lattice.rank().max(0) as usize,
            group_order: group.order(),
            group_class: class,
            counts: counts(&lattice, report.flag_count),
            plan: None,
            valencies: None,
            verification,
            notes,
        },
        lattice,
        action: None,
    })
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Point => "point",
        Branch::Segment => "segment",
        Branch::Wheel => "wheel",
        Branch::Polygon => "polygon",
        Branch::General => "general",
    }
}

pub fn construct(group: &PermGroup, opts: &ForgeOptions) -> Result<Construction> {
    let class = classify(group);
    match class {
        GroupClass::Trivial => special(Branch::Point, FaceLattice::point(), group, class, opts, vec![]),
        GroupClass::Cyclic { k: 2, .. } => special(Branch::Segment, fixtures::simplex(1), group, class, opts, vec![]),
        GroupClass::Cyclic { k, .. } => special(Branch::Wheel, wheel_polyhedron(k)?, group, class, opts, vec![]),
        GroupClass::Dihedral { k, .. } if !opts.force_general => {
            special(Branch::Polygon, fixtures::polygon(k), group, class, opts, vec![])
        }
        GroupClass::Dihedral { k, .. } => {
            let sc = Scaffold::new(group, opts)?;
            if sc.d < 3 {
                let note = format!("orbit polytope has dimension {}; the general pipeline needs d ≥ 3, so the polygon is used", sc.d);
                return special(Branch::Polygon, fixtures::polygon(k), group, class, opts, vec![note]);
            }
            general(group, class, sc, opts)
        }
        GroupClass::General => {
            let sc = Scaffold::new(group, opts)?;
            if sc.d < 3 {
                return Err(Error::Integrity(format!(
                    "non-dihedral group with a {}-dimensional orbit polytope",
                    sc.d
                )));
            }
            general(group, class, sc, opts)
        }
    }
}

fn general(group: &PermGroup, class: GroupClass, sc: Scaffold, opts: &ForgeOptions) -> Result<Construction> {
    let d = sc.d;
    let l_counts: Vec<usize> = (0..sc.base_star.len()).map(|i| d + 2 + i).collect();
    let plan = plan_valencies(&sc.cq, &l_counts)?;
    let templates: Vec<DecoratedSimplex> = l_counts
        .iter()
        .map(|&v| decorate_simplex(d, &plan.m_by_type, v))
        .collect::<Result<_>>()?;
    let estimate: usize = sc.cq.cells.len()
        + sc.chambers.len() / sc.base_star.len()
            * templates
                .iter()
                .map(|t| (1..d).map(|k| t.diagram.complex.count(k)).sum::<usize>())
                .sum::<usize>();
    if estimate > opts.max_faces {
        return Err(Error::resource(
            "decorate",
            format!("about {estimate} faces exceed the cap of {}", opts.max_faces),
        ));
    }
    let dc = decorate(&sc, group, &templates, &plan)?;
    let lattice = complete_polytope(&dc, opts.max_flags)?;
    let valencies = check_valencies(&lattice, &dc, &sc, &plan);
    if !valencies.pass {
        return Err(Error::Integrity(format!("valency audit failed: {valencies:?}")));
    }
    let vperms = vertex_action(&sc, &dc, group);
    let action = face_action(&lattice, &vperms)?;
    let flags = lattice.flags()?.len();
    let verification = if opts.certify {
        let eopts = EngineOptions {
            validate: false,
            ..Default::default()
        };
        Some(verify_construction_with(&lattice, group, &action, eopts)?)
    } else {
        None
    };
    Ok(Construction {
        report: ConstructionReport {
            branch: Branch::General,
            d,
            group_order: group.order(),
            group_class: class,
            counts: Counts {
                f_vector: lattice.f_vector(),
                flags,
                chambers: Some(sc.chambers.len()),
                q_f_vector: Some(sc.q.f_vector()),
            },
            plan: Some(plan),
            valencies: Some(valencies),
            verification,
            notes: vec![],
        },
        lattice,
        action: Some(action),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autgroup::{automorphisms, cyclic_witness};
    use crate::permgroup::{closure, Permutation};

    fn group(gens: &[&str], n: usize) -> PermGroup {
        closure(&gens.iter().map(|s| Permutation::parse(s, n).unwrap()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn wheels_have_cyclic_groups() {
        for k in 3..=8 {
            let w = wheel_polyhedron(k).unwrap();
            assert!(w.validate().is_valid());
            let f = w.f_vector();
            assert_eq!(f[1] as i64 - f[2] as i64 + f[3] as i64, 2);
            let aut = automorphisms(&w).unwrap();
            assert_eq!(aut.order, k, "k = {k}");
            assert!(cyclic_witness(&aut, k).is_some());
        }
        assert!(wheel_polyhedron(2).is_err());
    }

    #[test]
    fn small_branches() {
        let opts = ForgeOptions::default();
        let c1 = construct(&group(&["()"], 1), &opts).unwrap();
        assert_eq!(c1.report.branch, Branch::Point);
        assert_eq!(c1.lattice.rank(), 0);
        assert!(c1.certified());
        let c2 = construct(&group(&["(1 2)"], 2), &opts).unwrap();
        assert_eq!(c2.report.branch, Branch::Segment);
        assert_eq!(c2.report.verification.unwrap().aut_order, 2);
        let d5 = construct(&group(&["(1 2 3 4 5)", "(2 5)(3 4)"], 5), &opts).unwrap();
        assert_eq!(d5.report.branch, Branch::Polygon);
        assert!(d5.certified());
        let v4 = construct(&group(&["(1 2)(3 4)", "(1 3)(2 4)"], 4), &opts).unwrap();
        assert_eq!(v4.report.branch, Branch::Polygon);
        assert_eq!(v4.report.verification.unwrap().aut_order, 4);
    }

    #[test]
    fn v4_scaffold_and_plan() {
        let g = group(&["(1 2)(3 4)", "(1 3)(2 4)"], 4);
        let sc = Scaffold::new(&g, &ForgeOptions::default()).unwrap();
        assert_eq!(sc.d, 3);
        assert_eq!(sc.chambers.len(), 24);
        assert_eq!(sc.base_star.len(), 6);
        let l_counts: Vec<usize> = (0..6).map(|i| 5 + i).collect();
        let plan = plan_valencies(&sc.cq, &l_counts).unwrap();
        let stats: Vec<(usize, usize)> = plan.s_stats.iter().map(|t| (t.s_min, t.s_max)).collect();
        assert_eq!(stats, vec![(6, 6), (4, 4), (6, 6)]);
        assert!(plan.chain_holds());
        // every chamber is decorated once, six per vertex of Q
        let mut per_vertex = vec![0; 4];
        for ch in 0..sc.chambers.len() {
            per_vertex[sc.chamber_element(ch)] += 1;
        }
        assert_eq!(per_vertex, vec![6; 4]);
    }

    #[test]
    fn v4_general_end_to_end() {
        let g = group(&["(1 2)(3 4)", "(1 3)(2 4)"], 4);
        let opts = ForgeOptions {
            force_general: true,
            ..Default::default()
        };
        let c = construct(&g, &opts).unwrap();
        assert_eq!(c.report.branch, Branch::General);
        let v = c.report.verification.as_ref().unwrap();
        assert_eq!(v.aut_order, 4);
        assert!(v.certified, "{v:?}");
        assert_eq!(v.checks.len(), 3);
        let f = c.lattice.f_vector();
        assert_eq!(f[1] as i64 - f[2] as i64 + f[3] as i64, 2);
        assert!(c.report.valencies.as_ref().unwrap().pass);
    }

    #[test]
    fn plan_rejects_nothing_admissible() {
        assert!(ValencyPlan {
            d: 3,
            m: 10,
            m_by_type: vec![3, 3, 3],
            intervals: vec![[30, 40], [20, 25], [11, 12]],
            s_stats: vec![],
            l_vertex_counts: vec![],
        }
        .chain_holds());
        assert!(!ValencyPlan {
            d: 3,
            m: 10,
            m_by_type: vec![3, 3, 3],
            intervals: vec![[30, 40], [20, 31], [11, 12]],
            s_stats: vec![],
            l_vertex_counts: vec![],
        }
        .chain_holds());
    }
}
