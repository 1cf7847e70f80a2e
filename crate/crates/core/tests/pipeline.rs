use std::io::Write;

use num_bigint::BigInt;
use realcount::floor::count_degree;
use realcount::gw::{bound_report, kontsevich_nd};
use realcount::lattice::{build_grid, chi_polynomial, derive_relation};
use realcount::seeds::{paper_seeds, SeedDatabase};
use realcount::{AffineExpr, Error, SurfaceClass};

fn cp2(d: i64) -> SurfaceClass {
    SurfaceClass::cp2(d).unwrap()
}

#[test]
fn seed_file_round_trip() {
    let text = r#"[
        {"surface": {"c1d": 6, "dd": 4, "label": "CP2 degree 2"}, "sigma": 0, "s": 1, "value": 1, "provenance": "conics"},
        {"surface": {"c1d": 6, "dd": 4, "label": "CP2 degree 2"}, "sigma": 0, "s": 3, "value": 1, "provenance": "conics"}
    ]"#;
    let dir = std::env::temp_dir().join(format!("realcount-seeds-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("conics.json");
    std::fs::File::create(&path).unwrap().write_all(text.as_bytes()).unwrap();

    let db = SeedDatabase::load(&path).unwrap();
    let grid = build_grid(&cp2(2), &db.for_class(&cp2(2))).unwrap();
    assert_eq!(chi_polynomial(&grid).render(), "T + T^3 + T^5");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_seed_file() {
    let err = SeedDatabase::load(std::path::Path::new("/nonexistent/seeds.json")).unwrap_err();
    assert!(matches!(err, Error::SeedFile { .. }));
}

#[test]
fn conflicting_seed_values() {
    let text = r#"[
        {"surface": {"c1d": 9, "dd": 9, "label": "CP2 degree 3"}, "sigma": 0, "s": 0, "value": 0, "provenance": "a"},
        {"surface": {"c1d": 9, "dd": 9, "label": "CP2 degree 3"}, "sigma": 0, "s": 2, "value": 5, "provenance": "b"},
        {"surface": {"c1d": 9, "dd": 9, "label": "CP2 degree 3"}, "sigma": 1, "s": 1, "value": 1, "provenance": "c"}
    ]"#;
    let db = SeedDatabase::from_json(text, "inline").unwrap();
    // chi_2 = chi_0 + 2 theta_1 forces 5 = 2
    let err = build_grid(&cp2(3), &db.for_class(&cp2(3))).unwrap_err();
    match err {
        Error::SeedConflict { witness: Some(w), .. } => assert!(!w.constant.numer().eq(&BigInt::from(0))),
        other => panic!("expected a witnessed conflict, got {other}"),
    }
}

#[test]
fn cubic_counts_bound_the_real_ones() {
    let cls = cp2(3);
    let grid = build_grid(&cls, &paper_seeds().for_class(&cls)).unwrap();
    let n3 = kontsevich_nd(3).unwrap();
    assert_eq!(count_degree(3).unwrap().n_complex, n3);
    let top = derive_relation(&grid, 8).unwrap();
    assert_eq!(top, AffineExpr::constant(8));
    let b = bound_report(&cls, 8, &top, &n3).unwrap();
    assert!(b.parity_ok);
    assert_eq!(b.chi_abs, BigInt::from(8));
    // the fully real count from floor diagrams is the top coefficient
    assert_eq!(count_degree(3).unwrap().w_real, BigInt::from(8));
}

#[test]
fn every_bundled_class_builds() {
    let db = paper_seeds();
    let mut classes: Vec<_> = db.entries.iter().map(|e| e.cls.clone()).collect();
    classes.sort();
    classes.dedup();
    for cls in classes {
        build_grid(&cls, &db.for_class(&cls)).unwrap_or_else(|e| panic!("{cls}: {e}"));
    }
}
