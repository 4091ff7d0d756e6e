use std::path::PathBuf;

use tim_core::bounds::mais;
use tim_core::coloring::{chromatic_number, local_coloring_exact};
use tim_core::graph::ConflictGraph;
use tim_core::ia::{best_scheme, tdma_scheme, verify, LadderConfig, Method};
use tim_core::io::{load_instance, to_dot, SchemeFile};
use tim_core::Dof;

fn load(name: &str) -> ConflictGraph {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", &format!("{name}.json")]
        .iter()
        .collect();
    load_instance(path).unwrap()
}

fn ladder(name: &str, n: usize) -> (Dof, Method) {
    let g = load(name);
    let r = best_scheme(&g, n, &LadderConfig::default()).unwrap();
    assert!(verify(&g, &r.scheme, 3, 0).unwrap().valid, "{name}");
    (r.dof, r.method())
}

#[test]
fn pentagon_needs_vector_alignment() {
    assert_eq!(ladder("ex4", 1), (Dof::new(2, 5), Method::Ovia));
    assert_eq!(mais(&load("ex4")).unwrap().bound(), Dof::new(1, 2));
}

#[test]
fn ex5_separates_one_to_one_from_subspace() {
    let g = load("ex5");
    assert!(!local_coloring_exact(&g, 3).unwrap().is_found());
    assert_eq!(ladder("ex5", 1), (Dof::new(1, 3), Method::Ssia));
}

#[test]
fn tdma_matches_chromatic_number() {
    for name in ["ex2", "ex3", "ex5", "ex7"] {
        let g = load(name);
        let chi = chromatic_number(&g.underlying_undirected()).unwrap();
        let s = tdma_scheme(&g).unwrap();
        assert_eq!(s.dof(), Dof::new(1, chi as u64), "{name}");
        assert!(verify(&g, &s, 1, 0).unwrap().valid);
    }
}

#[test]
fn ex7_gains_with_antennas() {
    assert_eq!(ladder("ex7", 1).0, Dof::new(1, 6));
    assert_eq!(ladder("ex7", 2).0, Dof::new(1, 4));
    assert_eq!(ladder("ex7", 3).0, Dof::new(1, 3));
}

#[test]
fn ex8_stops_below_its_bound() {
    let (d, m) = ladder("ex8", 1);
    assert_eq!((d, m), (Dof::new(2, 7), Method::Svia));
    assert!(d < mais(&load("ex8")).unwrap().bound());
}

#[test]
fn scheme_files_survive_the_disk() {
    let g = load("ex5");
    let scheme = best_scheme(&g, 1, &LadderConfig::default()).unwrap().scheme;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scheme.json");
    tim_core::io::write_json(&path, &SchemeFile::from(&scheme)).unwrap();
    let back: SchemeFile = tim_core::io::read_json(&path).unwrap();
    let back = back.into_scheme(g.node_count()).unwrap();
    assert_eq!(back, scheme);
    assert_eq!(to_dot(&g, Some(&back)), to_dot(&g, Some(&scheme)));
}
