//! Automorphism groups of face lattices.
//!
//! An automorphism of a polytope is fixed by the image of one flag, since
//! it commutes with every `i`-adjacency and the flag graph is connected.
//! The engine tries every admissible image of a base flag and walks the
//! flag graph to extend it.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{CheckResult, FaceLattice, FlagSet, DEFAULT_FLAG_CAP};
use crate::permgroup::{GroupClass, PermGroup};

/// Hard cap on the face count accepted by the brute-force oracle.
pub const BRUTE_FORCE_FACE_CAP: usize = 40;

/// Automorphisms as face permutations: element `g` maps face `i` to `g[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AutGroup {
    pub order: usize,
    pub elements: Vec<Vec<u32>>,
    pub base_flag: Vec<u32>,
}

impl AutGroup {
    pub fn identity_index(&self) -> usize {
        self.elements
            .iter()
            .position(|g| g.iter().enumerate().all(|(i, &x)| i as u32 == x))
            .expect("identity is an automorphism")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    /// Prune candidate flags by color refinement of the Hasse diagram.
    pub filter: bool,
    /// Validate the lattice first.
    pub validate: bool,
    pub flag_cap: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            filter: true,
            validate: true,
            flag_cap: DEFAULT_FLAG_CAP,
        }
    }
}

/// `(a ∘ b)[i] = a[b[i]]`.
pub fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn inverse(a: &[u32]) -> Vec<u32> {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

pub fn is_identity(a: &[u32]) -> bool {
    a.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

pub fn perm_order(a: &[u32]) -> usize {
    let mut p = a.to_vec();
    let mut k = 1;
    while !is_identity(&p) {
        p = compose(a, &p);
        k += 1;
    }
    k
}

/// Whether `perm` is a rank-preserving bijection carrying covers onto covers.
pub fn is_automorphism(lattice: &FaceLattice, perm: &[u32]) -> bool {
    let n = lattice.len();
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in perm {
        if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
            return false;
        }
    }
    (0..n).all(|i| {
        let j = perm[i] as usize;
        if lattice.face_rank(i) != lattice.face_rank(j) {
            return false;
        }
        let mut img: Vec<u32> = lattice.covers(i).iter().map(|&c| perm[c as usize]).collect();
        img.sort_unstable();
        img == lattice.covers(j)
    })
}

/// Isomorphism-invariant face colors by iterated refinement of rank and
/// up/down neighbor colors.
pub fn refine_colors(lattice: &FaceLattice) -> Vec<u32> {
    let n = lattice.len();
    let mut colors: Vec<u32> = (0..n).map(|i| (lattice.face_rank(i) + 1) as u32).collect();
    let mut classes = 0;
    loop {
        let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..n)
            .map(|i| {
                let mut down: Vec<u32> = lattice.covers(i).iter().map(|&c| colors[c as usize]).collect();
                let mut up: Vec<u32> = lattice.covered_by(i).iter().map(|&c| colors[c as usize]).collect();
                down.sort_unstable();
                up.sort_unstable();
                (colors[i], down, up)
            })
            .collect();
        let ids: BTreeMap<&(u32, Vec<u32>, Vec<u32>), u32> = {
            let mut m = BTreeMap::new();
            for s in &sigs {
                m.insert(s, 0);
            }
            for (k, v) in m.values_mut().enumerate() {
                *v = k as u32;
            }
            m
        };
        let next: Vec<u32> = sigs.iter().map(|s| ids[s]).collect();
        let count = ids.len();
        colors = next;
        if count == classes {
            return colors;
        }
        classes = count;
    }
}

/// Extends `base ↦ target` along the flag graph; returns the induced face
/// map when it is a well-defined automorphism.
fn extend(lattice: &FaceLattice, flags: &FlagSet, base: usize, target: usize) -> Option<Vec<u32>> {
    let nf = flags.len();
    let d = flags.rank();
    let mut image = vec![u32::MAX; nf];
    let mut used = vec![false; nf];
    image[base] = target as u32;
    used[target] = true;
    let mut queue = VecDeque::from([base]);
    while let Some(f) = queue.pop_front() {
        let g = image[f] as usize;
        for r in 0..d {
            let nf_ = flags.adjacent(f, r);
            let ng = flags.adjacent(g, r) as u32;
            if image[nf_] == u32::MAX {
                if std::mem::replace(&mut used[ng as usize], true) {
                    return None;
                }
                image[nf_] = ng;
                queue.push_back(nf_);
            } else if image[nf_] != ng {
                return None;
            }
        }
    }
    if image.contains(&u32::MAX) {
        return None;
    }
    let n = lattice.len();
    let mut face_map = vec![u32::MAX; n];
    let least = lattice.least()?;
    let greatest = lattice.greatest()?;
    face_map[least] = least as u32;
    face_map[greatest] = greatest as u32;
    for f in 0..nf {
        let src = flags.flag(f);
        let dst = flags.flag(image[f] as usize);
        for r in 0..d {
            let slot = &mut face_map[src[r] as usize];
            if *slot == u32::MAX {
                *slot = dst[r];
            } else if *slot != dst[r] {
                return None;
            }
        }
    }
    is_automorphism(lattice, &face_map).then_some(face_map)
}

pub fn automorphisms(lattice: &FaceLattice) -> Result<AutGroup> {
    automorphisms_with(lattice, EngineOptions::default())
}

pub fn automorphisms_with(lattice: &FaceLattice, opts: EngineOptions) -> Result<AutGroup> {
    if opts.validate {
        let report = lattice.validate_with(opts.flag_cap);
        if let Some(fail) = report.first_failure() {
            return Err(Error::Validation(format!(
                "lattice fails {}: {}",
                fail.name,
                fail.witness.clone().unwrap_or_default()
            )));
        }
    }
    let flags = lattice.flags()?;
    if flags.rank() == 0 {
        return Ok(AutGroup {
            order: 1,
            elements: vec![(0..lattice.len() as u32).collect()],
            base_flag: Vec::new(),
        });
    }
    let (base, candidates) = if opts.filter {
        let colors = refine_colors(lattice);
        let mut classes: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for f in 0..flags.len() {
            let sig: Vec<u32> = flags.flag(f).iter().map(|&x| colors[x as usize]).collect();
            classes.entry(sig).or_default().push(f);
        }
        let (_, members) = classes
            .into_iter()
            .min_by(|(sa, a), (sb, b)| a.len().cmp(&b.len()).then_with(|| sa.cmp(sb)))
            .expect("at least one flag");
        (members[0], members)
    } else {
        (0, (0..flags.len()).collect())
    };
    let mut elements: Vec<Vec<u32>> = candidates
        .par_iter()
        .filter_map(|&t| extend(lattice, &flags, base, t))
        .collect();
    elements.sort();
    Ok(AutGroup {
        order: elements.len(),
        elements,
        base_flag: flags.flag(base).to_vec(),
    })
}

/// Independent oracle: backtracking over rank-preserving face bijections.
pub fn brute_force_automorphisms(lattice: &FaceLattice) -> Result<AutGroup> {
    let n = lattice.len();
    if n > BRUTE_FORCE_FACE_CAP {
        return Err(Error::resource(
            "brute-force automorphisms",
            format!("{n} faces exceed the cap of {BRUTE_FORCE_FACE_CAP}"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (lattice.face_rank(i), i));
    fn search(
        lat: &FaceLattice,
        order: &[usize],
        pos: usize,
        map: &mut Vec<u32>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if pos == order.len() {
            out.push(map.clone());
            return;
        }
        let f = order[pos];
        let mut want: Vec<u32> = lat.covers(f).iter().map(|&c| map[c as usize]).collect();
        want.sort_unstable();
        for g in 0..lat.len() {
            if used[g]
                || lat.face_rank(g) != lat.face_rank(f)
                || lat.covered_by(g).len() != lat.covered_by(f).len()
                || lat.covers(g) != want.as_slice()
            {
                continue;
            }
            used[g] = true;
            map[f] = g as u32;
            search(lat, order, pos + 1, map, used, out);
            used[g] = false;
        }
        map[f] = u32::MAX;
    }
    let mut out = Vec::new();
    search(lattice, &order, 0, &mut vec![u32::MAX; n], &mut vec![false; n], &mut out);
    out.sort();
    let base_flag = lattice.flags().map(|f| f.flag(0).to_vec()).unwrap_or_default();
    Ok(AutGroup {
        order: out.len(),
        elements: out,
        base_flag,
    })
}

/// An element of order `k`.
pub fn cyclic_witness(group: &AutGroup, k: usize) -> Option<usize> {
    group.elements.iter().position(|g| perm_order(g) == k)
}

/// `(r, s)` with `r` of order `k`, `s` an involution outside `⟨r⟩` and
/// `s r s = r⁻¹`.
pub fn dihedral_witness(group: &AutGroup, k: usize) -> Option<(usize, usize)> {
    let els = &group.elements;
    for (ri, r) in els.iter().enumerate() {
        if perm_order(r) != k {
            continue;
        }
        let mut powers = vec![r.clone()];
        while !is_identity(powers.last().unwrap()) {
            let next = compose(r, powers.last().unwrap());
            powers.push(next);
        }
        let r_inv = inverse(r);
        for (si, s) in els.iter().enumerate() {
            if perm_order(s) == 2 && !powers.contains(s) && compose(s, &compose(r, s)) == r_inv {
                return Some((ri, si));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationResult {
    pub aut_order: usize,
    pub certified: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &str, pass: bool, witness: Option<String>) -> CheckResult {
    CheckResult {
        name: name.into(),
        pass,
        witness: if pass { None } else { witness },
    }
}

/// Certifies `Aut(lattice) = Γ` for an explicit action: `embedding[g]` is
/// the face permutation of group element `g`.
pub fn verify_construction(lattice: &FaceLattice, group: &PermGroup, embedding: &[Vec<u32>]) -> Result<VerificationResult> {
    verify_construction_with(lattice, group, embedding, EngineOptions::default())
}

pub fn verify_construction_with(
    lattice: &FaceLattice,
    group: &PermGroup,
    embedding: &[Vec<u32>],
    opts: EngineOptions,
) -> Result<VerificationResult> {
    if embedding.len() != group.order() {
        return Err(Error::Validation(format!(
            "embedding has {} elements for a group of order {}",
            embedding.len(),
            group.order()
        )));
    }
    let bad_auto = embedding.iter().position(|p| !is_automorphism(lattice, p));
    let mut bad_hom = None;
    'outer: for &a in &group.generator_indices() {
        for b in 0..group.order() {
            if embedding[group.mul(a, b)] != compose(&embedding[a], &embedding[b]) {
                bad_hom = Some((a, b));
                break 'outer;
            }
        }
    }
    let embeds = check(
        "gamma_embeds",
        bad_auto.is_none() && bad_hom.is_none(),
        Some(match (bad_auto, bad_hom) {
            (Some(g), _) => format!("element {} does not act as an automorphism", group.element(g)),
            (_, Some((a, b))) => format!(
                "action of {} ∘ {} is not the composite action",
                group.element(a),
                group.element(b)
            ),
            _ => String::new(),
        }),
    );
    let mut seen: HashMap<&[u32], usize> = HashMap::new();
    let mut clash = None;
    for (g, p) in embedding.iter().enumerate() {
        if let Some(&h) = seen.get(p.as_slice()) {
            clash = Some((h, g));
            break;
        }
        seen.insert(p, g);
    }
    let injective = check(
        "embedding_injective",
        clash.is_none(),
        clash.map(|(h, g)| format!("{} and {} act identically", group.element(h), group.element(g))),
    );
    let aut = automorphisms_with(lattice, opts)?;
    let order = check(
        "aut_order_equals_group_order",
        aut.order == group.order(),
        Some(format!("|Aut| = {} but |Γ| = {}", aut.order, group.order())),
    );
    let checks = vec![embeds, injective, order];
    Ok(VerificationResult {
        aut_order: aut.order,
        certified: checks.iter().all(|c| c.pass),
        checks,
    })
}

/// Certifies a branch without an explicit action: `|Aut| = |Γ|` plus an
/// abstract isomorphism witness for the cyclic and dihedral classes.
pub fn verify_abstract(lattice: &FaceLattice, class: &GroupClass, group_order: usize) -> Result<VerificationResult> {
    let aut = automorphisms(lattice)?;
    let mut checks = vec![check(
        "aut_order_equals_group_order",
        aut.order == group_order,
        Some(format!("|Aut| = {} but |Γ| = {group_order}", aut.order)),
    )];
    match class {
        GroupClass::Trivial => {}
        GroupClass::Cyclic { k, .. } => {
            let w = cyclic_witness(&aut, *k);
            checks.push(CheckResult {
                name: "cyclic_witness".into(),
                pass: w.is_some(),
                witness: Some(match w {
                    Some(i) => format!("automorphism {i} has order {k}"),
                    None => format!("no automorphism of order {k}"),
                }),
            });
        }
        GroupClass::Dihedral { k, .. } => {
            let w = dihedral_witness(&aut, *k);
            checks.push(CheckResult {
                name: "dihedral_witness".into(),
                pass: w.is_some(),
                witness: Some(match w {
                    Some((r, s)) => format!("r = automorphism {r} (order {k}), s = automorphism {s}"),
                    None => format!("no dihedral pair of order {k}"),
                }),
            });
        }
        GroupClass::General => {
            return Err(Error::Unsupported(
                "general groups are certified through an explicit action".into(),
            ))
        }
    }
    Ok(VerificationResult {
        aut_order: aut.order,
        certified: checks.iter().all(|c| c.pass),
        checks,
    })
}
