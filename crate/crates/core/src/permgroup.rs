//! Finite groups as permutation groups.
//!
//! Points are 0-based internally; cycle notation on the wire is 1-based.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of group elements materialized by [`closure`].
pub const DEFAULT_ELEMENT_CAP: usize = 10080;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from its image list, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::Validation("permutation of degree 0".into()));
        }
        let mut seen = vec![false; n];
        for (i, &x) in images.iter().enumerate() {
            if x >= n || seen[x] {
                return Err(Error::Validation(format!(
                    "images are not a bijection: position {i} maps to {x}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    /// `self ∘ rhs`: first apply `rhs`, then `self`.
    pub fn compose(&self, rhs: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), rhs.degree());
        Permutation {
            images: rhs.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i as u32 == x)
            .count()
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }

    /// Parses disjoint cycles of 1-based points, e.g. `"(1 2)(3 4)"`.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Validation("degree must be positive".into()));
        }
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        let bytes = text.as_bytes();
        let mut pos = 0;
        let err = |pos: usize, token: &str, message: &str| Error::Parse {
            position: pos,
            token: token.to_string(),
            message: message.to_string(),
        };
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        while pos < bytes.len() {
            if bytes[pos] != b'(' {
                let end = token_end(bytes, pos);
                return Err(err(pos, &text[pos..end], "expected `(`"));
            }
            let open = pos;
            pos += 1;
            let mut cycle: Vec<usize> = Vec::new();
            loop {
                skip_ws(&mut pos);
                if pos >= bytes.len() {
                    return Err(err(open, &text[open..], "unterminated cycle"));
                }
                if bytes[pos] == b')' {
                    pos += 1;
                    break;
                }
                let start = pos;
                let end = token_end(bytes, pos);
                let token = &text[start..end];
                let point: usize = token
                    .parse()
                    .map_err(|_| err(start, token, "not a positive integer"))?;
                if point == 0 || point > degree {
                    return Err(err(start, token, "point out of range"));
                }
                if used[point - 1] {
                    return Err(err(start, token, "repeated point"));
                }
                used[point - 1] = true;
                cycle.push(point - 1);
                pos = end;
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(i + 1) % cycle.len()] as u32;
            }
            skip_ws(&mut pos);
        }
        Ok(Permutation { images })
    }

    pub fn to_cycle_string(&self) -> String {
        let mut seen = vec![false; self.degree()];
        let mut out = String::new();
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push((x + 1).to_string());
                x = self.apply(x);
            }
            out.push('(');
            out.push_str(&cycle.join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

fn token_end(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len()
        && !bytes[pos].is_ascii_whitespace()
        && bytes[pos] != b')'
        && bytes[pos] != b'('
    {
        pos += 1;
    }
    pos
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

/// A permutation group with all of its elements materialized.
///
/// Element 0 is always the identity. The remaining elements appear in the
/// breadth-first order in which [`closure`] discovered them.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl PermGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Index of `elements[a] ∘ elements[b]`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].compose(&self.elements[b])]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.index[&self.elements[a].inverse()]
    }

    /// Indices of the generators within the element list.
    pub fn generator_indices(&self) -> Vec<usize> {
        self.generators.iter().map(|g| self.index[g]).collect()
    }
}

/// Breadth-first closure of the generators, capped at [`DEFAULT_ELEMENT_CAP`].
pub fn closure(generators: &[Permutation]) -> Result<PermGroup> {
    closure_with_cap(generators, DEFAULT_ELEMENT_CAP)
}

pub fn closure_with_cap(generators: &[Permutation], cap: usize) -> Result<PermGroup> {
    let degree = match generators.first() {
        Some(g) => g.degree(),
        None => return Err(Error::Validation("no generators given".into())),
    };
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::Validation(format!(
            "generator {g} has degree {} but expected {degree}",
            g.degree()
        )));
    }
    let id = Permutation::identity(degree);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::new();
    index.insert(id, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let p = g.compose(&elements[i]);
            if index.contains_key(&p) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::resource(
                    "group closure",
                    format!("more than {cap} elements"),
                ));
            }
            index.insert(p.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(p);
        }
    }
    Ok(PermGroup {
        degree,
        generators: generators.to_vec(),
        elements,
        index,
    })
}

/// The branch a group is routed to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
pub enum GroupClass {
    Trivial,
    /// `generator` is an element index of order `k`.
    Cyclic { k: usize, generator: usize },
    /// `s r s = r⁻¹`, `r` of order `k`, `s` an involution outside `⟨r⟩`.
    Dihedral { k: usize, r: usize, s: usize },
    General,
}

impl GroupClass {
    pub fn name(&self) -> &'static str {
        match self {
            GroupClass::Trivial => "trivial",
            GroupClass::Cyclic { .. } => "cyclic",
            GroupClass::Dihedral { .. } => "dihedral",
            GroupClass::General => "general",
        }
    }
}

fn element_orders(group: &PermGroup) -> Vec<usize> {
    group.elements().iter().map(Permutation::order).collect()
}

pub fn classify(group: &PermGroup) -> GroupClass {
    let n = group.order();
    if n == 1 {
        return GroupClass::Trivial;
    }
    let orders = element_orders(group);
    if let Some(g) = orders.iter().position(|&o| o == n) {
        return GroupClass::Cyclic { k: n, generator: g };
    }
    match find_dihedral_pair(group, &orders) {
        Some((r, s)) => GroupClass::Dihedral { k: n / 2, r, s },
        None => GroupClass::General,
    }
}

fn find_dihedral_pair(group: &PermGroup, orders: &[usize]) -> Option<(usize, usize)> {
    let n = group.order();
    if n % 2 != 0 || n < 4 {
        return None;
    }
    let k = n / 2;
    for r in (0..n).filter(|&r| orders[r] == k) {
        let mut powers = vec![false; n];
        let mut x = 0;
        for _ in 0..k {
            powers[x] = true;
            x = group.mul(r, x);
        }
        let r_inv = group.inv(r);
        for s in (0..n).filter(|&s| orders[s] == 2 && !powers[s]) {
            if group.mul(group.mul(s, r), s) == r_inv {
                return Some((r, s));
            }
        }
    }
    None
}

/// Left-regular (Cayley) representation of a group given by its
/// multiplication table, identity at index 0.
pub fn regular_embedding(table: &[Vec<usize>]) -> Result<PermGroup> {
    let g = table.len();
    if g == 0 {
        return Err(Error::Validation("empty multiplication table".into()));
    }
    for (a, row) in table.iter().enumerate() {
        if row.len() != g {
            return Err(Error::Validation(format!(
                "row {a} has length {} but expected {g}",
                row.len()
            )));
        }
        let mut seen = vec![false; g];
        for (b, &c) in row.iter().enumerate() {
            if c >= g || seen[c] {
                return Err(Error::Validation(format!(
                    "table is not a Latin square at cell ({a}, {b})"
                )));
            }
            seen[c] = true;
        }
    }
    for b in 0..g {
        let mut seen = vec![false; g];
        for (a, row) in table.iter().enumerate() {
            if seen[row[b]] {
                return Err(Error::Validation(format!(
                    "table is not a Latin square at cell ({a}, {b})"
                )));
            }
            seen[row[b]] = true;
        }
    }
    for a in 0..g {
        if table[0][a] != a || table[a][0] != a {
            return Err(Error::Validation(format!(
                "index 0 is not the identity: cell ({a}, 0) or (0, {a})"
            )));
        }
    }
    for a in 0..g {
        for b in 0..g {
            for c in 0..g {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::Validation(format!(
                        "not associative at triple ({a}, {b}, {c})"
                    )));
                }
            }
        }
    }
    let perms: Vec<Permutation> = (0..g)
        .map(|a| Permutation::from_images(table[a].clone()))
        .collect::<Result<_>>()?;
    let generators = if g == 1 { perms } else { perms[1..].to_vec() };
    let group = closure(&generators)?;
    debug_assert_eq!(group.order(), g);
    Ok(group)
}

/// Group input file: either generators in cycle notation or a table.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("group JSON: {e}")))
    }

    pub fn build(&self) -> Result<PermGroup> {
        match (&self.generators, &self.table) {
            (Some(gens), None) => {
                let degree = self
                    .degree
                    .ok_or_else(|| Error::Validation("\"degree\" is required with generators".into()))?;
                if gens.is_empty() {
                    return closure(&[Permutation::identity(degree)]);
                }
                let perms = gens
                    .iter()
                    .map(|s| Permutation::parse(s, degree))
                    .collect::<Result<Vec<_>>>()?;
                closure(&perms)
            }
            (None, Some(table)) => regular_embedding(table),
            _ => Err(Error::Validation(
                "exactly one of \"generators\" and \"table\" must be present".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse(s, n).unwrap()
    }

    fn group(gens: &[&str], n: usize) -> PermGroup {
        closure(&gens.iter().map(|s| p(s, n)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn parse_cycles() {
        assert_eq!(p("(1 2)(3 4)", 4).images(), vec![1, 0, 3, 2]);
        assert_eq!(p("()", 3).images(), vec![0, 1, 2]);
        assert_eq!(p("(1 2 3)", 4).images(), vec![1, 2, 0, 3]);
        assert_eq!(p("  ( 1  3 ) ", 3).images(), vec![2, 1, 0]);
    }

    #[test]
    fn parse_errors_name_the_token() {
        match Permutation::parse("(1 2)(2 3)", 3) {
            Err(Error::Parse { token, position, .. }) => {
                assert_eq!(token, "2");
                assert_eq!(position, 6);
            }
            other => panic!("{other:?}"),
        }
        match Permutation::parse("(1 5)", 4) {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "5"),
            other => panic!("{other:?}"),
        }
        match Permutation::parse("(1 x)", 4) {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "x"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Permutation::parse("(1 2", 4), Err(Error::Parse { .. })));
        assert!(matches!(Permutation::parse("1 2", 4), Err(Error::Parse { .. })));
    }

    #[test]
    fn cycle_string_roundtrip() {
        let q = p("(1 4 2)(3 5)", 6);
        assert_eq!(q.to_cycle_string(), "(1 4 2)(3 5)");
        assert_eq!(Permutation::parse(&q.to_cycle_string(), 6).unwrap(), q);
    }

    #[test]
    fn closure_orders() {
        assert_eq!(group(&["(1 2)(3 4)", "(1 3)(2 4)"], 4).order(), 4);
        assert_eq!(group(&["(1 2 3)"], 3).order(), 3);
        assert_eq!(group(&["(1 2)", "(1 2 3 4)"], 4).order(), 24);
    }

    #[test]
    fn closure_cap() {
        let gens = [p("(1 2)", 8), p("(1 2 3 4 5 6 7 8)", 8)];
        assert!(matches!(closure(&gens), Err(Error::Resource { .. })));
        assert_eq!(closure_with_cap(&gens, 40320).unwrap().order(), 40320);
    }

    #[test]
    fn closure_is_closed() {
        let g = group(&["(1 2 3)", "(1 2)(3 4)"], 4);
        assert_eq!(g.order(), 12);
        assert!(g.element(0).is_identity());
        for a in g.elements() {
            for b in g.elements() {
                assert!(g.index_of(&a.compose(b)).is_some());
            }
            assert!(g.index_of(&a.inverse()).is_some());
        }
    }

    #[test]
    fn classify_examples() {
        let v4 = group(&["(1 2)(3 4)", "(1 3)(2 4)"], 4);
        match classify(&v4) {
            GroupClass::Dihedral { k, r, s } => {
                assert_eq!(k, 2);
                assert_eq!(v4.element(r).order(), 2);
                assert_eq!(v4.element(s).order(), 2);
                assert_ne!(r, s);
            }
            c => panic!("{c:?}"),
        }
        assert_eq!(
            classify(&group(&["(1 2 3 4 5)"], 5)),
            GroupClass::Cyclic { k: 5, generator: 1 }
        );
        assert_eq!(classify(&group(&["(1 2 3)", "(1 2)(3 4)"], 4)), GroupClass::General);
        assert_eq!(classify(&group(&["()"], 2)), GroupClass::Trivial);
        let d5 = group(&["(1 2 3 4 5)", "(2 5)(3 4)"], 5);
        assert!(matches!(classify(&d5), GroupClass::Dihedral { k: 5, .. }));
        let s4 = group(&["(1 2)", "(1 2 3 4)"], 4);
        assert_eq!(classify(&s4), GroupClass::General);
    }

    /// Independent check: A4 has no cyclic subgroup of index 2 at all.
    #[test]
    fn a4_has_no_index_two_cyclic_subgroup() {
        let a4 = group(&["(1 2 3)", "(1 2)(3 4)"], 4);
        assert!(a4.elements().iter().all(|e| e.order() != 6));
    }

    #[test]
    fn classify_is_stable_under_reordering() {
        let a = group(&["(1 2)(3 4)", "(1 3)(2 4)"], 4);
        let b = group(&["(1 3)(2 4)", "(1 2)(3 4)"], 4);
        assert_eq!(classify(&a).name(), classify(&b).name());
        let c = group(&["(1 2 3 4 5 6)", "(2 6)(3 5)"], 6);
        let d = group(&["(2 6)(3 5)", "(1 2 3 4 5 6)"], 6);
        assert!(matches!(classify(&c), GroupClass::Dihedral { k: 6, .. }));
        assert!(matches!(classify(&d), GroupClass::Dihedral { k: 6, .. }));
    }

    fn quaternion_table() -> Vec<Vec<usize>> {
        // elements: 1, -1, i, -i, j, -j, k, -k encoded as (sign, unit)
        let unit_mul = |a: usize, b: usize| -> (bool, usize) {
            // units 0=1, 1=i, 2=j, 3=k ; returns (negate, unit)
            match (a, b) {
                (0, x) | (x, 0) => (false, x),
                (x, y) if x == y => (true, 0),
                (1, 2) => (false, 3),
                (2, 3) => (false, 1),
                (3, 1) => (false, 2),
                (2, 1) => (true, 3),
                (3, 2) => (true, 1),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        };
        let decode = |e: usize| (e % 2 == 1, e / 2);
        let encode = |neg: bool, u: usize| u * 2 + usize::from(neg);
        (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (na, ua) = decode(a);
                        let (nb, ub) = decode(b);
                        let (nc, uc) = unit_mul(ua, ub);
                        encode(na ^ nb ^ nc, uc)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn regular_embedding_examples() {
        let c2 = regular_embedding(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!((c2.degree(), c2.order()), (2, 2));
        let c1 = regular_embedding(&[vec![0]]).unwrap();
        assert_eq!((c1.degree(), c1.order()), (1, 1));
        let q8 = regular_embedding(&quaternion_table()).unwrap();
        assert_eq!((q8.degree(), q8.order()), (8, 8));
        for e in q8.elements().iter().filter(|e| !e.is_identity()) {
            assert_eq!(e.fixed_points(), 0);
        }
        assert_eq!(classify(&q8), GroupClass::General);
    }

    #[test]
    fn regular_embedding_rejects_bad_tables() {
        assert!(regular_embedding(&[vec![0, 1], vec![0, 1]]).is_err());
        // Latin square with identity 0 but not associative (order 5 loop)
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        match regular_embedding(&loop5) {
            Err(Error::Validation(msg)) => assert!(msg.contains("associative"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn group_spec_json() {
        let g = GroupSpec::from_json(r#"{"degree": 4, "generators": ["(1 2)(3 4)", "(1 3)(2 4)"]}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(g.order(), 4);
        let t = GroupSpec::from_json(r#"{"table": [[0,1],[1,0]]}"#).unwrap().build().unwrap();
        assert_eq!(t.order(), 2);
        let both = GroupSpec::from_json(r#"{"degree": 2, "generators": [], "table": [[0]]}"#).unwrap();
        assert!(both.build().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn perm(n: usize) -> impl Strategy<Value = Permutation> {
            Just((0..n).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap())
        }

        proptest! {
            #[test]
            fn closure_contains_products(a in perm(5), b in perm(5)) {
                let g = closure(&[a, b]).unwrap();
                prop_assert_eq!(120 % g.order(), 0);
                for x in g.elements() {
                    for y in g.generators() {
                        prop_assert!(g.index_of(&x.compose(y)).is_some());
                    }
                }
            }

            #[test]
            fn cycle_notation_roundtrip(a in perm(7)) {
                prop_assert_eq!(Permutation::parse(&a.to_cycle_string(), 7).unwrap(), a);
            }
        }
    }
}
