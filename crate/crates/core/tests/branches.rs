//! The special branches and the general pipeline on small groups.

use std::time::{Duration, Instant};

use polyforge::forge::{construct, Branch, ForgeOptions};
use polyforge::permgroup::{closure, PermGroup, Permutation};

fn group(gens: &[&str], n: usize) -> PermGroup {
    let mut perms: Vec<Permutation> = gens.iter().map(|s| Permutation::parse(s, n).unwrap()).collect();
    if perms.is_empty() {
        perms.push(Permutation::identity(n));
    }
    closure(&perms).unwrap()
}

fn run(g: &PermGroup, force_general: bool) -> polyforge::forge::Construction {
    let opts = ForgeOptions { force_general, ..ForgeOptions::default() };
    let start = Instant::now();
    let c = construct(g, &opts).unwrap();
    assert!(start.elapsed() < Duration::from_secs(60));
    c
}

fn check_names(c: &polyforge::forge::Construction) -> Vec<String> {
    c.report.verification.as_ref().unwrap().checks.iter().map(|c| c.name.clone()).collect()
}

#[test]
fn trivial_group_is_a_point() {
    let c = run(&group(&[], 3), false);
    assert_eq!(c.report.branch, Branch::Point);
    assert_eq!(c.lattice.f_vector(), vec![1, 1]);
    assert!(c.certified());
}

#[test]
fn c2_is_a_segment() {
    let c = run(&group(&["(1 2)"], 2), false);
    assert_eq!(c.report.branch, Branch::Segment);
    assert_eq!(c.report.verification.as_ref().unwrap().aut_order, 2);
}

#[test]
fn cyclic_wheels() {
    for k in [3, 5, 7] {
        let cycle = format!("({})", (1..=k).map(|i| i.to_string()).collect::<Vec<_>>().join(" "));
        let c = run(&group(&[&cycle], k), false);
        assert_eq!(c.report.branch, Branch::Wheel);
        let v = c.report.verification.as_ref().unwrap();
        assert_eq!(v.aut_order, k);
        assert!(v.certified);
        assert!(check_names(&c).contains(&"cyclic_witness".to_string()));
    }
}

#[test]
fn d5_polygon() {
    let c = run(&group(&["(1 2 3 4 5)", "(2 5)(3 4)"], 5), false);
    assert_eq!(c.report.branch, Branch::Polygon);
    let v = c.report.verification.as_ref().unwrap();
    assert_eq!(v.aut_order, 10);
    assert!(v.certified);
    assert!(check_names(&c).contains(&"dihedral_witness".to_string()));
}

#[test]
fn v4_defaults_to_a_digon_and_forces_general() {
    let v4 = group(&["(1 2)(3 4)", "(1 3)(2 4)"], 4);
    let c = run(&v4, false);
    assert_eq!(c.report.branch, Branch::Polygon);
    assert_eq!(c.report.verification.as_ref().unwrap().aut_order, 4);

    let c = run(&v4, true);
    assert_eq!(c.report.branch, Branch::General);
    let v = c.report.verification.as_ref().unwrap();
    assert_eq!(v.aut_order, 4);
    assert!(v.certified);
    assert_eq!(check_names(&c), ["gamma_embeds", "embedding_injective", "aut_order_equals_group_order"]);
    assert!(c.report.plan.as_ref().unwrap().chain_holds());
    assert!(c.report.valencies.as_ref().unwrap().pass);
}

#[test]
fn small_dihedral_forced_general_falls_back() {
    let c = run(&group(&["(1 2 3)", "(1 2)"], 3), true);
    assert_eq!(c.report.branch, Branch::Polygon);
    assert!(!c.report.notes.is_empty());
}

#[test]
fn q8_regular_embedding_hits_the_chamber_cap() {
    let q8 = group(&["(1 2 4 8)(3 6 7 5)", "(1 3 4 7)(2 5 8 6)"], 8);
    assert_eq!(q8.order(), 8);
    let err = construct(&q8, &ForgeOptions::default()).unwrap_err();
    assert!(matches!(err, polyforge::Error::Resource { .. }), "{err}");
}

#[test]
fn reports_are_reproducible() {
    let v4 = group(&["(1 2)(3 4)", "(1 3)(2 4)"], 4);
    let a = run(&v4, true);
    let b = run(&v4, true);
    assert_eq!(serde_json::to_string(&a.report).unwrap(), serde_json::to_string(&b.report).unwrap());
    assert_eq!(a.lattice, b.lattice);
}
