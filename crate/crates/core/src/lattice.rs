//! Ranked face lattices of abstract polytopes.
//!
//! A [`FaceLattice`] stores every face with its rank and the faces it covers.
//! Lattices built by this crate use dense ids assigned rank-major: the least
//! face is id 0 and vertex `i` is id `1 + i`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default flag count above which strong flag-connectivity is sampled.
pub const DEFAULT_FLAG_CAP: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub id: usize,
    pub rank: i32,
    pub covers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub rank: i32,
    pub faces: Vec<Face>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceLattice {
    rank: i32,
    ranks: Vec<i32>,
    down: Vec<Vec<u32>>,
    up: Vec<Vec<u32>>,
}

impl FaceLattice {
    /// Builds a lattice from `(rank, covers)` records indexed by face id.
    ///
    /// Only structural well-formedness is checked here; the polytope axioms
    /// are the job of [`FaceLattice::validate`].
    pub fn new(rank: i32, faces: Vec<(i32, Vec<usize>)>) -> Result<Self> {
        if rank < -1 {
            return Err(Error::Structural(format!("rank {rank} is below -1")));
        }
        let n = faces.len();
        let mut ranks = Vec::with_capacity(n);
        let mut down = Vec::with_capacity(n);
        for (id, (r, covers)) in faces.into_iter().enumerate() {
            if r < -1 || r > rank {
                return Err(Error::Structural(format!(
                    "face {id} has rank {r} outside -1..={rank}"
                )));
            }
            let mut covers: Vec<u32> = covers
                .into_iter()
                .map(|c| {
                    if c >= n {
                        Err(Error::Structural(format!(
                            "face {id} covers unknown face {c}"
                        )))
                    } else {
                        Ok(c as u32)
                    }
                })
                .collect::<Result<_>>()?;
            covers.sort_unstable();
            covers.dedup();
            ranks.push(r);
            down.push(covers);
        }
        let mut up = vec![Vec::new(); n];
        for (id, covers) in down.iter().enumerate() {
            for &c in covers {
                up[c as usize].push(id as u32);
            }
        }
        Ok(FaceLattice {
            rank,
            ranks,
            down,
            up,
        })
    }

    pub fn from_json(json: &LatticeJson) -> Result<Self> {
        let n = json.faces.len();
        let mut slots: Vec<Option<(i32, Vec<usize>)>> = vec![None; n];
        for f in &json.faces {
            if f.id >= n {
                return Err(Error::Structural(format!(
                    "face id {} is not dense (only {n} faces)",
                    f.id
                )));
            }
            if slots[f.id].is_some() {
                return Err(Error::Structural(format!("duplicate face id {}", f.id)));
            }
            slots[f.id] = Some((f.rank, f.covers.clone()));
        }
        FaceLattice::new(json.rank, slots.into_iter().map(Option::unwrap).collect())
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let json: LatticeJson = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("lattice JSON: {e}")))?;
        FaceLattice::from_json(&json)
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            rank: self.rank,
            faces: (0..self.len())
                .map(|id| Face {
                    id,
                    rank: self.ranks[id],
                    covers: self.down[id].iter().map(|&c| c as usize).collect(),
                })
                .collect(),
        }
    }

    /// The rank-0 polytope: a single point.
    pub fn point() -> Self {
        FaceLattice::new(0, vec![(-1, vec![]), (0, vec![0])]).expect("point lattice")
    }

    /// Builds the lattice whose proper faces are given by vertex sets.
    ///
    /// `cells` lists proper faces of rank ≥ 1 as `(rank, vertices)`;
    /// vertices `0..n_vertices` become rank-0 faces. Covers are derived
    /// from containment between consecutive ranks, so faces must be
    /// determined by their vertex sets.
    pub fn from_vertex_sets(rank: i32, n_vertices: usize, cells: Vec<(i32, Vec<u32>)>) -> Result<Self> {
        if rank == 0 {
            if n_vertices != 1 || !cells.is_empty() {
                return Err(Error::Structural("rank-0 lattice must be a single point".into()));
            }
            return Ok(FaceLattice::point());
        }
        let top = rank as usize;
        let mut by_rank: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); top];
        for v in 0..n_vertices as u32 {
            by_rank[0].insert(vec![v]);
        }
        for (r, mut vs) in cells {
            if r < 1 || r >= rank {
                return Err(Error::Structural(format!("cell of rank {r} in a rank-{rank} lattice")));
            }
            vs.sort_unstable();
            vs.dedup();
            if let Some(&v) = vs.iter().find(|&&v| v as usize >= n_vertices) {
                return Err(Error::Structural(format!("cell uses unknown vertex {v}")));
            }
            by_rank[r as usize].insert(vs);
        }
        let mut faces: Vec<(i32, Vec<usize>)> = vec![(-1, vec![])];
        let mut offsets = Vec::with_capacity(top);
        let mut lists: Vec<Vec<Vec<u32>>> = Vec::with_capacity(top);
        for (r, set) in by_rank.into_iter().enumerate() {
            offsets.push(faces.len());
            let list: Vec<Vec<u32>> = set.into_iter().collect();
            for _ in 0..list.len() {
                faces.push((r as i32, vec![]));
            }
            lists.push(list);
        }
        for id in offsets[0]..offsets[0] + lists[0].len() {
            faces[id].1 = vec![0];
        }
        for r in 1..top {
            let lower = &lists[r - 1];
            let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
            for (i, vs) in lower.iter().enumerate() {
                for &v in vs {
                    by_vertex[v as usize].push(i);
                }
            }
            for (i, vs) in lists[r].iter().enumerate() {
                let mut cand: Vec<usize> = vs
                    .iter()
                    .flat_map(|&v| by_vertex[v as usize].iter().copied())
                    .collect();
                cand.sort_unstable();
                cand.dedup();
                let covers: Vec<usize> = cand
                    .into_iter()
                    .filter(|&c| is_subset(&lower[c], vs))
                    .map(|c| offsets[r - 1] + c)
                    .collect();
                faces[offsets[r] + i].1 = covers;
            }
        }
        let top_covers: Vec<usize> = (offsets[top - 1]..offsets[top - 1] + lists[top - 1].len()).collect();
        faces.push((rank, top_covers));
        FaceLattice::new(rank, faces)
    }

    /// Face lattice of a polytope from its vertex–facet incidences.
    ///
    /// Faces are the nonempty intersections of facets; the facets of a face
    /// are its maximal proper intersections with facets.
    pub fn from_facets(n_vertices: usize, facets: &[Vec<usize>]) -> Result<Self> {
        if n_vertices == 1 && facets.is_empty() {
            return Ok(FaceLattice::point());
        }
        let facet_sets: Vec<Vec<u32>> = {
            let set: BTreeSet<Vec<u32>> = facets
                .iter()
                .map(|f| {
                    let mut f: Vec<u32> = f.iter().map(|&v| v as u32).collect();
                    f.sort_unstable();
                    f.dedup();
                    f
                })
                .collect();
            set.into_iter().collect()
        };
        if facet_sets.is_empty() {
            return Err(Error::Structural("no facets".into()));
        }
        let mut levels: Vec<BTreeSet<Vec<u32>>> = vec![facet_sets.iter().cloned().collect()];
        loop {
            let current = levels.last().unwrap();
            let singletons = current.iter().filter(|f| f.len() == 1).count();
            if singletons == current.len() {
                break;
            }
            if singletons != 0 {
                return Err(Error::Structural(
                    "facet incidences do not describe a graded lattice".into(),
                ));
            }
            let mut next = BTreeSet::new();
            for face in current {
                let mut cands: Vec<Vec<u32>> = facet_sets
                    .iter()
                    .map(|g| intersect(face, g))
                    .filter(|x| !x.is_empty() && x.len() < face.len())
                    .collect();
                cands.sort_unstable();
                cands.dedup();
                for (i, c) in cands.iter().enumerate() {
                    let maximal = cands
                        .iter()
                        .enumerate()
                        .all(|(j, o)| i == j || o.len() <= c.len() || !is_subset(c, o));
                    if maximal {
                        next.insert(c.clone());
                    }
                }
            }
            levels.push(next);
        }
        let rank = levels.len() as i32;
        let vertices = levels.last().unwrap();
        if vertices.len() != n_vertices {
            let present: HashSet<u32> = vertices.iter().map(|v| v[0]).collect();
            let missing = (0..n_vertices as u32).find(|v| !present.contains(v));
            return Err(Error::Structural(format!(
                "point {} is not a vertex of the facet system",
                missing.map_or_else(|| "?".to_string(), |v| v.to_string())
            )));
        }
        let cells: Vec<(i32, Vec<u32>)> = levels[..levels.len() - 1]
            .iter()
            .enumerate()
            .flat_map(|(depth, set)| {
                let r = rank - 1 - depth as i32;
                set.iter().map(move |vs| (r, vs.clone()))
            })
            .collect();
        FaceLattice::from_vertex_sets(rank, n_vertices, cells)
    }

    pub fn rank(&self) -> i32 {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn face_rank(&self, id: usize) -> i32 {
        self.ranks[id]
    }

    /// Faces covered by `id`.
    pub fn covers(&self, id: usize) -> &[u32] {
        &self.down[id]
    }

    /// Faces covering `id`.
    pub fn covered_by(&self, id: usize) -> &[u32] {
        &self.up[id]
    }

    pub fn faces_of_rank(&self, r: i32) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.ranks[i] == r)
    }

    /// Number of faces of each rank `-1..=rank`.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; (self.rank + 2) as usize];
        for &r in &self.ranks {
            f[(r + 1) as usize] += 1;
        }
        f
    }

    pub fn least(&self) -> Option<usize> {
        let mut it = self.faces_of_rank(-1);
        match (it.next(), it.next()) {
            (Some(a), None) => Some(a),
            _ => None,
        }
    }

    pub fn greatest(&self) -> Option<usize> {
        let mut it = self.faces_of_rank(self.rank);
        match (it.next(), it.next()) {
            (Some(a), None) => Some(a),
            _ => None,
        }
    }

    fn bounds(&self) -> Result<(usize, usize)> {
        match (self.least(), self.greatest()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Validation("lattice is not bounded".into())),
        }
    }

    /// Sorted rank-0 faces below each face.
    pub fn vertex_sets(&self) -> Vec<Vec<u32>> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.ranks[i]);
        let mut sets: Vec<Vec<u32>> = vec![Vec::new(); self.len()];
        for i in order {
            match self.ranks[i] {
                -1 => {}
                0 => sets[i] = vec![i as u32],
                _ => {
                    let mut acc: Vec<u32> = Vec::new();
                    for &c in &self.down[i] {
                        acc = union(&acc, &sets[c as usize]);
                    }
                    sets[i] = acc;
                }
            }
        }
        sets
    }

    /// Vertex degree in the edge graph.
    pub fn valency(&self, vertex: usize) -> usize {
        self.up[vertex]
            .iter()
            .filter(|&&e| self.ranks[e as usize] == 1)
            .count()
    }

    /// All faces `h` with `id ≤ h`.
    pub fn up_closure(&self, id: usize) -> Vec<usize> {
        closure(id, &self.up)
    }

    /// All faces `h` with `h ≤ id`.
    pub fn down_closure(&self, id: usize) -> Vec<usize> {
        closure(id, &self.down)
    }

    /// Returns a copy with one cover relation removed (for building mutants).
    pub fn without_cover(&self, upper: usize, lower: usize) -> Self {
        let faces = (0..self.len())
            .map(|i| {
                let covers = self.down[i]
                    .iter()
                    .map(|&c| c as usize)
                    .filter(|&c| !(i == upper && c == lower))
                    .collect();
                (self.ranks[i], covers)
            })
            .collect();
        FaceLattice::new(self.rank, faces).expect("subset of a well-formed lattice")
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(DEFAULT_FLAG_CAP)
    }

    /// Checks boundedness, gradedness, flag length, the diamond condition,
    /// flag-connectivity and strong flag-connectivity.
    ///
    /// Sections are checked exhaustively when the lattice has at most
    /// `flag_cap` flags; otherwise every section with an improper end plus a
    /// strided sample of the rest.
    pub fn validate_with(&self, flag_cap: usize) -> ValidationReport {
        let mut report = ValidationReport::default();

        let least: Vec<usize> = self.faces_of_rank(-1).collect();
        let greatest: Vec<usize> = self.faces_of_rank(self.rank).collect();
        let mut bounded = least.len() == 1 && greatest.len() == 1;
        let mut witness = None;
        if !bounded {
            witness = Some(format!(
                "{} faces of rank -1, {} faces of rank {}",
                least.len(),
                greatest.len(),
                self.rank
            ));
        } else {
            for i in 0..self.len() {
                if self.ranks[i] > -1 && self.down[i].is_empty() {
                    bounded = false;
                    witness = Some(format!("face {i} covers nothing"));
                    break;
                }
                if self.ranks[i] < self.rank && self.up[i].is_empty() {
                    bounded = false;
                    witness = Some(format!("face {i} is covered by nothing"));
                    break;
                }
            }
        }
        report.push("bounded", bounded, witness);

        let graded_witness = (0..self.len()).find_map(|i| {
            self.down[i]
                .iter()
                .find(|&&c| self.ranks[c as usize] != self.ranks[i] - 1)
                .map(|&c| format!("face {i} (rank {}) covers face {c} (rank {})", self.ranks[i], self.ranks[c as usize]))
        });
        let graded = graded_witness.is_none();
        report.push("graded", graded, graded_witness);
        report.push(
            "flag_length",
            bounded && graded,
            (!(bounded && graded)).then(|| "maximal chains need not have full length".to_string()),
        );

        let diamond_witness = self.diamond_violation();
        let diamond = diamond_witness.is_none();
        report.push("diamond", diamond, diamond_witness);

        if !(bounded && graded && diamond) {
            report.push(
                "flag_connected",
                false,
                Some("skipped: earlier axioms failed".into()),
            );
            report.push(
                "strongly_flag_connected",
                false,
                Some("skipped: earlier axioms failed".into()),
            );
            return report;
        }

        match self.flags() {
            Ok(flags) => {
                report.flag_count = flags.len();
                let connected = flags.is_connected();
                report.push(
                    "flag_connected",
                    connected,
                    (!connected).then(|| "flag graph has several components".to_string()),
                );
                let (ok, checked, exhaustive, witness) = self.check_sections(flags.len() <= flag_cap);
                report.sections_checked = checked;
                report.exhaustive = exhaustive;
                report.push("strongly_flag_connected", ok, witness);
            }
            Err(e) => {
                report.push("flag_connected", false, Some(e.to_string()));
                report.push("strongly_flag_connected", false, Some("skipped".into()));
            }
        }
        report
    }

    fn diamond_violation(&self) -> Option<String> {
        let mut count: HashMap<u32, u32> = HashMap::new();
        for f in 0..self.len() {
            if self.ranks[f] + 2 > self.rank {
                continue;
            }
            count.clear();
            for &h in &self.up[f] {
                for &g in &self.up[h as usize] {
                    *count.entry(g).or_insert(0) += 1;
                }
            }
            let mut bad: Vec<(u32, u32)> = count.iter().filter(|(_, &c)| c != 2).map(|(&g, &c)| (g, c)).collect();
            bad.sort_unstable();
            if let Some(&(g, c)) = bad.first() {
                return Some(format!(
                    "faces {f} (rank {}) and {g} (rank {}) have {c} intermediate faces",
                    self.ranks[f], self.ranks[g as usize]
                ));
            }
        }
        None
    }

    /// Returns `(all connected, sections checked, exhaustive, witness)`.
    fn check_sections(&self, exhaustive: bool) -> (bool, usize, bool, Option<String>) {
        const EXTRA_SAMPLE: usize = 1000;
        let (least, greatest) = match self.bounds() {
            Ok(b) => b,
            Err(e) => return (false, 0, false, Some(e.to_string())),
        };
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut others: Vec<(usize, usize)> = Vec::new();
        for g in 0..self.len() {
            if self.ranks[g] < 2 {
                continue;
            }
            for f in self.down_closure(g) {
                if self.ranks[g] - self.ranks[f] < 3 {
                    continue;
                }
                if f == least || g == greatest {
                    pairs.push((f, g));
                } else {
                    others.push((f, g));
                }
            }
        }
        let all = exhaustive || others.len() <= EXTRA_SAMPLE;
        if all {
            pairs.extend(others);
        } else {
            let stride = others.len().div_ceil(EXTRA_SAMPLE);
            pairs.extend(others.into_iter().step_by(stride));
        }
        pairs.sort_unstable();
        for &(f, g) in &pairs {
            if !self.section_connected(f, g) {
                return (
                    false,
                    pairs.len(),
                    all,
                    Some(format!("section {g}/{f} is not flag-connected")),
                );
            }
        }
        (true, pairs.len(), all, None)
    }

    /// Flag-connectivity of the section `upper/lower`.
    pub fn section_connected(&self, lower: usize, upper: usize) -> bool {
        let below_upper: HashSet<usize> = self.down_closure(upper).into_iter().collect();
        let depth = (self.ranks[upper] - self.ranks[lower] - 1) as usize;
        if depth == 0 {
            return true;
        }
        let mut chains: Vec<Vec<u32>> = Vec::new();
        let mut stack: Vec<u32> = Vec::new();
        fn walk(
            lat: &FaceLattice,
            cur: usize,
            depth: usize,
            within: &HashSet<usize>,
            stack: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if stack.len() == depth {
                out.push(stack.clone());
                return;
            }
            for &h in &lat.up[cur] {
                if within.contains(&(h as usize)) {
                    stack.push(h);
                    walk(lat, h as usize, depth, within, stack, out);
                    stack.pop();
                }
            }
        }
        walk(self, lower, depth, &below_upper, &mut stack, &mut chains);
        if chains.is_empty() {
            return false;
        }
        let index: HashMap<&[u32], usize> = chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let mut seen = vec![false; chains.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut reached = 1;
        while let Some(i) = queue.pop_front() {
            let chain = &chains[i];
            for pos in 0..depth {
                let lo = if pos == 0 { lower } else { chain[pos - 1] as usize };
                let hi = if pos + 1 == depth { upper } else { chain[pos + 1] as usize };
                for &alt in &self.up[lo] {
                    if alt == chain[pos] || !self.down[hi].contains(&alt) {
                        continue;
                    }
                    let mut next = chain.clone();
                    next[pos] = alt;
                    if let Some(&j) = index.get(next.as_slice()) {
                        if !seen[j] {
                            seen[j] = true;
                            reached += 1;
                            queue.push_back(j);
                        }
                    }
                }
            }
        }
        reached == chains.len()
    }

    /// Enumerates flags (faces of ranks `0..rank`) and their adjacencies.
    pub fn flags(&self) -> Result<FlagSet> {
        let (least, greatest) = self.bounds()?;
        let d = self.rank.max(0) as usize;
        let mut faces: Vec<u32> = Vec::new();
        let mut count = 0usize;
        if d == 0 {
            count = 1;
        } else {
            let mut stack: Vec<u32> = Vec::with_capacity(d);
            fn walk(lat: &FaceLattice, cur: usize, d: usize, stack: &mut Vec<u32>, out: &mut Vec<u32>, count: &mut usize) {
                if stack.len() == d {
                    out.extend_from_slice(stack);
                    *count += 1;
                    return;
                }
                for &h in &lat.up[cur] {
                    stack.push(h);
                    walk(lat, h as usize, d, stack, out, count);
                    stack.pop();
                }
            }
            walk(self, least, d, &mut stack, &mut faces, &mut count);
        }
        let index: HashMap<&[u32], u32> = (0..count)
            .map(|i| (&faces[i * d..(i + 1) * d], i as u32))
            .collect();
        let mut adj = vec![0u32; count * d];
        for i in 0..count {
            let flag = &faces[i * d..(i + 1) * d];
            for r in 0..d {
                let lo = if r == 0 { least } else { flag[r - 1] as usize };
                let hi = if r + 1 == d { greatest } else { flag[r + 1] as usize };
                let alts: Vec<u32> = self.up[lo]
                    .iter()
                    .copied()
                    .filter(|&h| h != flag[r] && self.down[hi].binary_search(&h).is_ok())
                    .collect();
                if alts.len() != 1 {
                    return Err(Error::Validation(format!(
                        "flag {i} has {} {r}-adjacent flags",
                        alts.len()
                    )));
                }
                let mut other = flag.to_vec();
                other[r] = alts[0];
                adj[i * d + r] = *index
                    .get(other.as_slice())
                    .ok_or_else(|| Error::Validation(format!("adjacent flag of flag {i} missing")))?;
            }
        }
        drop(index);
        Ok(FlagSet { d, faces, adj })
    }
}

fn closure(id: usize, edges: &[Vec<u32>]) -> Vec<usize> {
    let mut seen = HashSet::from([id]);
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for &y in &edges[x] {
            if seen.insert(y as usize) {
                stack.push(y as usize);
            }
        }
    }
    let mut out: Vec<usize> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

pub(crate) fn is_subset(small: &[u32], big: &[u32]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

pub(crate) fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub flag_count: usize,
    pub sections_checked: usize,
    pub exhaustive: bool,
}

impl ValidationReport {
    fn push(&mut self, name: &str, pass: bool, witness: Option<String>) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            pass,
            witness,
        });
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// All flags of a lattice with their `i`-adjacency maps.
#[derive(Clone, Debug)]
pub struct FlagSet {
    d: usize,
    faces: Vec<u32>,
    adj: Vec<u32>,
}

impl FlagSet {
    pub fn len(&self) -> usize {
        if self.d == 0 {
            1
        } else {
            self.faces.len() / self.d
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    /// Faces of ranks `0..rank` of flag `i`.
    pub fn flag(&self, i: usize) -> &[u32] {
        &self.faces[i * self.d..(i + 1) * self.d]
    }

    /// The `r`-adjacent flag of flag `i`.
    #[inline]
    pub fn adjacent(&self, i: usize, r: usize) -> usize {
        self.adj[i * self.d + r] as usize
    }

    pub fn is_connected(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut reached = 1;
        while let Some(i) = stack.pop() {
            for r in 0..self.d {
                let j = self.adjacent(i, r);
                if !seen[j] {
                    seen[j] = true;
                    reached += 1;
                    stack.push(j);
                }
            }
        }
        reached == n
    }
}

/// A vertex of a barycentric subdivision: a proper face of the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BsdVertex {
    /// Rank of the origin face.
    pub ty: usize,
    /// Face id in the source lattice.
    pub origin: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub dim: usize,
    pub vertices: Vec<u32>,
    pub facets: Vec<u32>,
}

/// Order complex of the boundary of a polytope, with type-labelled vertices.
///
/// Vertex ids follow the source faces rank-major, so every cell lists its
/// vertices in increasing type. Chamber `i` corresponds to flag `i` of
/// [`FaceLattice::flags`].
#[derive(Clone, Debug, Serialize)]
pub struct LabelledComplex {
    pub dim: usize,
    pub vertices: Vec<BsdVertex>,
    pub cells: Vec<Cell>,
    pub chambers: Vec<u32>,
    #[serde(skip)]
    face_to_vertex: HashMap<usize, u32>,
    #[serde(skip)]
    cell_index: HashMap<Vec<u32>, u32>,
}

pub fn barycentric_subdivision(lattice: &FaceLattice) -> Result<LabelledComplex> {
    let d = lattice.rank();
    if d < 1 {
        return Err(Error::Unsupported(format!(
            "barycentric subdivision of a rank-{d} lattice"
        )));
    }
    let (_, greatest) = lattice.bounds()?;
    let mut proper: Vec<usize> = (0..lattice.len())
        .filter(|&i| lattice.face_rank(i) >= 0 && i != greatest)
        .collect();
    proper.sort_by_key(|&i| (lattice.face_rank(i), i));
    let vertices: Vec<BsdVertex> = proper
        .iter()
        .map(|&i| BsdVertex {
            ty: lattice.face_rank(i) as usize,
            origin: i,
        })
        .collect();
    let face_to_vertex: HashMap<usize, u32> = proper
        .iter()
        .enumerate()
        .map(|(v, &f)| (f, v as u32))
        .collect();

    // Strict up-sets restricted to proper faces, as vertex ids.
    let above: Vec<Vec<u32>> = proper
        .iter()
        .map(|&f| {
            let mut a: Vec<u32> = lattice
                .up_closure(f)
                .into_iter()
                .filter(|&g| g != f && g != greatest)
                .map(|g| face_to_vertex[&g])
                .collect();
            a.sort_unstable();
            a
        })
        .collect();

    let mut chains: Vec<Vec<u32>> = Vec::new();
    fn extend(above: &[Vec<u32>], chain: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(chain.clone());
        let last = *chain.last().unwrap() as usize;
        for &next in &above[last] {
            chain.push(next);
            extend(above, chain, out);
            chain.pop();
        }
    }
    for v in 0..vertices.len() as u32 {
        let mut chain = vec![v];
        extend(&above, &mut chain, &mut chains);
    }
    chains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let cell_index: HashMap<Vec<u32>, u32> = chains
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i as u32))
        .collect();
    let top = (d - 1) as usize;
    let cells: Vec<Cell> = chains
        .iter()
        .map(|c| {
            let facets = if c.len() == 1 {
                Vec::new()
            } else {
                let mut f: Vec<u32> = (0..c.len())
                    .map(|skip| {
                        let sub: Vec<u32> = c
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != skip)
                            .map(|(_, &x)| x)
                            .collect();
                        cell_index[&sub]
                    })
                    .collect();
                f.sort_unstable();
                f
            };
            Cell {
                dim: c.len() - 1,
                vertices: c.clone(),
                facets,
            }
        })
        .collect();

    // Chambers in flag order.
    let flags = lattice.flags()?;
    let chambers: Vec<u32> = (0..flags.len())
        .map(|i| {
            let key: Vec<u32> = flags.flag(i).iter().map(|&f| face_to_vertex[&(f as usize)]).collect();
            cell_index[&key]
        })
        .collect();
    debug_assert!(chambers.iter().all(|&c| cells[c as usize].dim == top));

    Ok(LabelledComplex {
        dim: top,
        vertices,
        cells,
        chambers,
        face_to_vertex,
        cell_index,
    })
}

/// A set of cells of a [`LabelledComplex`], by cell id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubComplex {
    pub cells: Vec<u32>,
}

impl LabelledComplex {
    pub fn vertex_of_face(&self, face: usize) -> Option<u32> {
        self.face_to_vertex.get(&face).copied()
    }

    pub fn cell_id(&self, vertices: &[u32]) -> Option<u32> {
        self.cell_index.get(vertices).copied()
    }

    fn check_vertex(&self, v: u32) -> Result<()> {
        if (v as usize) < self.vertices.len() {
            Ok(())
        } else {
            Err(Error::Validation(format!("unknown vertex {v}")))
        }
    }

    /// All cells containing `v`, plus all their faces.
    pub fn vertex_star(&self, v: u32) -> Result<SubComplex> {
        self.check_vertex(v)?;
        let mut set = BTreeSet::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.vertices.contains(&v) {
                let mut stack = vec![i as u32];
                while let Some(x) = stack.pop() {
                    if set.insert(x) {
                        stack.extend(self.cells[x as usize].facets.iter().copied());
                    }
                }
            }
        }
        Ok(SubComplex {
            cells: set.into_iter().collect(),
        })
    }

    /// Cells of the star that avoid `v`.
    pub fn vertex_link(&self, v: u32) -> Result<SubComplex> {
        let star = self.vertex_star(v)?;
        Ok(SubComplex {
            cells: star
                .cells
                .into_iter()
                .filter(|&c| !self.cells[c as usize].vertices.contains(&v))
                .collect(),
        })
    }

    /// Number of chambers containing `v`.
    pub fn chamber_count_through(&self, v: u32) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self
            .chambers
            .iter()
            .filter(|&&c| self.cells[c as usize].vertices.contains(&v))
            .count())
    }

    /// Degree of `v` in the edge graph.
    pub fn valency(&self, v: u32) -> usize {
        self.cells
            .iter()
            .filter(|c| c.dim == 1 && c.vertices.contains(&v))
            .count()
    }

    pub fn cells_of_dim(&self, dim: usize) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter().filter(move |c| c.dim == dim)
    }

    /// The order-complex lattice: cells plus improper faces.
    pub fn to_lattice(&self) -> Result<FaceLattice> {
        let cells = self
            .cells
            .iter()
            .filter(|c| c.dim >= 1)
            .map(|c| (c.dim as i32, c.vertices.clone()))
            .collect();
        FaceLattice::from_vertex_sets(self.dim as i32 + 1, self.vertices.len(), cells)
    }
}

#[cfg(test)]
mod tests {
    use crate::fixtures::*;
    use super::*;

    #[test]
    fn cube_passes_validation() {
        let cube = cube();
        assert_eq!(cube.f_vector(), vec![1, 8, 12, 6, 1]);
        let r = cube.validate();
        assert!(r.is_valid(), "{r:?}");
        assert_eq!(r.flag_count, 48);
        assert!(r.exhaustive);
    }

    #[test]
    fn pentagon_passes_validation() {
        let r = polygon(5).validate();
        assert!(r.is_valid());
        assert_eq!(r.flag_count, 10);
    }

    #[test]
    fn deleted_cover_breaks_diamond() {
        let cube = cube();
        let square = cube.faces_of_rank(2).next().unwrap();
        let edge = cube.covers(square)[0] as usize;
        let mutant = cube.without_cover(square, edge);
        let r = mutant.validate();
        assert!(!r.is_valid());
        let diamond = r.check("diamond").unwrap();
        assert!(!diamond.pass);
        let w = diamond.witness.as_ref().unwrap();
        assert!(w.contains("(rank 0)") && w.contains("(rank 2)"), "{w}");
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            FaceLattice::new(1, vec![(-1, vec![]), (0, vec![7])]),
            Err(Error::Structural(_))
        ));
        assert!(FaceLattice::new(1, vec![(3, vec![])]).is_err());
    }

    #[test]
    fn unbounded_lattice_fails() {
        // two least faces
        let lat = FaceLattice::new(1, vec![(-1, vec![]), (-1, vec![]), (0, vec![0]), (0, vec![1]), (1, vec![2, 3])]).unwrap();
        let r = lat.validate();
        assert!(!r.check("bounded").unwrap().pass);
    }

    #[test]
    fn disconnected_union_fails_flag_connectivity() {
        // two disjoint triangles sharing least and greatest faces: rank 2, diamond ok
        let mut facets: Vec<Vec<u32>> = Vec::new();
        for base in [0u32, 3] {
            for i in 0..3 {
                facets.push(vec![base + i, base + (i + 1) % 3]);
            }
        }
        let cells = facets.into_iter().map(|f| (1, f)).collect();
        let lat = FaceLattice::from_vertex_sets(2, 6, cells).unwrap();
        let r = lat.validate();
        assert!(r.check("diamond").unwrap().pass);
        assert!(!r.check("flag_connected").unwrap().pass);
    }

    #[test]
    fn flag_counts_and_adjacency() {
        let tet = simplex(3);
        let flags = tet.flags().unwrap();
        assert_eq!(flags.len(), 24);
        for i in 0..flags.len() {
            let partners: BTreeSet<usize> = (0..3).map(|r| flags.adjacent(i, r)).collect();
            assert_eq!(partners.len(), 3);
            assert!(!partners.contains(&i));
        }
        let pent = polygon(5).flags().unwrap();
        assert_eq!(pent.len(), 10);
        for r in 0..2 {
            for i in 0..10 {
                let j = pent.adjacent(i, r);
                assert_ne!(i, j);
                assert_eq!(pent.adjacent(j, r), i);
            }
        }
        let cube = cube().flags().unwrap();
        assert_eq!(cube.len(), 48);
        assert!((0..48).all(|i| cube.adjacent(i, 0) != i && cube.adjacent(cube.adjacent(i, 0), 0) == i));
    }

    #[test]
    fn point_and_segment() {
        let p = FaceLattice::point();
        assert!(p.validate().is_valid());
        assert_eq!(p.flags().unwrap().len(), 1);
        let seg = FaceLattice::from_facets(2, &[vec![0], vec![1]]).unwrap();
        assert_eq!(seg.rank(), 1);
        assert!(seg.validate().is_valid());
        assert_eq!(seg.flags().unwrap().len(), 2);
        assert!(barycentric_subdivision(&p).is_err());
    }

    #[test]
    fn subdivision_counts() {
        let c = barycentric_subdivision(&cube()).unwrap();
        assert_eq!(c.vertices.len(), 26);
        assert_eq!(c.chambers.len(), 48);
        let t = barycentric_subdivision(&simplex(3)).unwrap();
        assert_eq!((t.vertices.len(), t.chambers.len()), (14, 24));
        let tri = barycentric_subdivision(&simplex(2)).unwrap();
        assert_eq!((tri.vertices.len(), tri.chambers.len()), (6, 6));
    }

    #[test]
    fn chambers_are_typed_flags() {
        let c = barycentric_subdivision(&cube()).unwrap();
        for &ch in &c.chambers {
            let types: Vec<usize> = c.cells[ch as usize].vertices.iter().map(|&v| c.vertices[v as usize].ty).collect();
            assert_eq!(types, vec![0, 1, 2]);
        }
    }

    #[test]
    fn ridges_lie_in_two_chambers() {
        for lat in [cube(), simplex(3), simplex(4), polygon(7)] {
            let c = barycentric_subdivision(&lat).unwrap();
            let mut count: HashMap<u32, usize> = HashMap::new();
            for &ch in &c.chambers {
                for &f in &c.cells[ch as usize].facets {
                    *count.entry(f).or_default() += 1;
                }
            }
            assert_eq!(count.len(), c.cells_of_dim(c.dim - 1).count());
            assert!(count.values().all(|&n| n == 2));
        }
    }

    #[test]
    fn stars_and_links() {
        let cube = cube();
        let c = barycentric_subdivision(&cube).unwrap();
        let vertex = c.vertex_of_face(1).unwrap();
        assert_eq!(c.vertices[vertex as usize].ty, 0);
        let star = c.vertex_star(vertex).unwrap();
        let chambers_in_star = star.cells.iter().filter(|&&x| c.cells[x as usize].dim == 2).count();
        assert_eq!(chambers_in_star, 6);
        let link = c.vertex_link(vertex).unwrap();
        let edges = link.cells.iter().filter(|&&x| c.cells[x as usize].dim == 1).count();
        let points = link.cells.iter().filter(|&&x| c.cells[x as usize].dim == 0).count();
        assert_eq!((edges, points), (6, 6));
        let square = cube.faces_of_rank(2).next().unwrap();
        let sv = c.vertex_of_face(square).unwrap();
        let star = c.vertex_star(sv).unwrap();
        assert_eq!(star.cells.iter().filter(|&&x| c.cells[x as usize].dim == 2).count(), 8);
        assert!(c.vertex_star(999).is_err());
    }

    #[test]
    fn chamber_counts_by_type() {
        let cube = cube();
        let c = barycentric_subdivision(&cube).unwrap();
        let mut by_type = [BTreeSet::new(), BTreeSet::new(), BTreeSet::new()];
        for v in 0..c.vertices.len() as u32 {
            by_type[c.vertices[v as usize].ty].insert(c.chamber_count_through(v).unwrap());
        }
        assert_eq!(by_type[0], BTreeSet::from([6]));
        assert_eq!(by_type[1], BTreeSet::from([4]));
        assert_eq!(by_type[2], BTreeSet::from([8]));
        let total: usize = (0..c.vertices.len() as u32)
            .filter(|&v| c.vertices[v as usize].ty == 0)
            .map(|v| c.chamber_count_through(v).unwrap())
            .sum();
        assert_eq!(total, 48);
        assert!(c.chamber_count_through(1000).is_err());
    }

    #[test]
    fn order_complex_lattice_is_a_polytope() {
        let c = barycentric_subdivision(&cube()).unwrap();
        let lat = c.to_lattice().unwrap();
        let r = lat.validate();
        assert!(r.is_valid(), "{r:?}");
        assert_eq!(lat.f_vector(), vec![1, 26, 72, 48, 1]);
    }

    #[test]
    fn json_roundtrip() {
        let cube = cube();
        let text = serde_json::to_string(&cube.to_json()).unwrap();
        assert_eq!(FaceLattice::parse_json(&text).unwrap(), cube);
    }
}
