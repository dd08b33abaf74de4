use polyforge::realize::{builtin, pull_realize, to_off, RealizeOptions};

fn counts(name: &str) -> (usize, usize) {
    let r = pull_realize(&builtin(name).unwrap(), &RealizeOptions::default()).unwrap();
    assert!(r.certificate.isomorphic, "{name}");
    assert!(r.result.facets.iter().all(|f| f.vertices.len() == r.result.dim()));
    (r.result.vertices.len(), r.result.facets.len())
}

#[test]
fn triangle() {
    assert_eq!(counts("triangle"), (6, 6));
}

#[test]
fn pentagon() {
    assert_eq!(counts("pentagon"), (10, 10));
}

#[test]
fn tetrahedron() {
    assert_eq!(counts("tetrahedron"), (14, 24));
}

#[test]
fn cube() {
    assert_eq!(counts("cube"), (26, 48));
}

#[test]
fn octahedron() {
    assert_eq!(counts("octahedron"), (26, 48));
}

#[test]
fn four_simplex() {
    assert_eq!(counts("4-simplex"), (30, 120));
}

#[test]
fn runs_are_reproducible() {
    let run = || {
        let r = pull_realize(&builtin("cube").unwrap(), &RealizeOptions::default()).unwrap();
        (
            to_off(&r.result, 8).unwrap(),
            serde_json::to_string(&r.to_json()).unwrap(),
            serde_json::to_string(&r.certificate).unwrap(),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn tight_q_limit_is_a_resource_error() {
    let opts = RealizeOptions { q_max: 1, ..RealizeOptions::default() };
    let err = pull_realize(&builtin("cube").unwrap(), &opts).unwrap_err();
    assert!(matches!(err, polyforge::Error::Resource { .. }), "{err}");
}
