use da_denom_core::catalog::{self, CatalogError};
use da_denom_core::certify::{derive_delta_nu, CertifyError};
use da_denom_core::experiments::run_nonsplit_experiment;
use da_denom_core::Exec;

#[test]
fn every_claim_holds_except_the_nonsplit_product() {
    for e in catalog::all() {
        let report = catalog::run(&e, None).unwrap();
        for r in &report.results {
            let expect_fail = e.name == "nonsplit" && r.id == "product";
            assert_eq!(r.passed, !expect_fail, "{} / {}: {}", e.name, r.id, r.detail);
        }
    }
}

#[test]
fn nonsplit_product_fails_exactly_at_three_indices() {
    let r = run_nonsplit_experiment(400, Exec::default()).unwrap();
    assert_eq!(r.stated_failures(), vec![7, 17, 41]);
    assert!(r.verdicts.iter().all(|v| v.shortened && v.running_lcm));
}

#[test]
fn overlaps_and_limits() {
    let want = [
        ("riccati(1)", 60),
        ("gregory", 60),
        ("bernoulli", 60),
        ("tangent", 60),
        ("weierstrass(4, 0)", 40),
        ("painleve2(0, 0, 0, 1; 0, 1)", 40),
        ("kepler(3/5, 4/5)", 40),
        ("dilog-inverse", 60),
        ("nonsplit", 60),
    ];
    for (name, overlap) in want {
        assert_eq!(catalog::by_name(name).unwrap().overlap, overlap, "{name}");
    }
}

#[test]
fn family_names_select_the_default_point() {
    assert_eq!(catalog::by_name("kepler").unwrap().name, "kepler(3/5, 4/5)");
    assert_eq!(catalog::by_name("weierstrass").unwrap().name, "weierstrass(4, 0)");
    assert!(matches!(catalog::by_name("nope"), Err(CatalogError::UnknownEntry(_))));
}

#[test]
fn only_the_nonsplit_entry_is_ineligible() {
    for e in catalog::all() {
        let mut spec = e.spec.clone();
        if spec.sigma1 < 0 {
            spec = da_denom_core::shift::shift_to_nonnegative(&spec).unwrap().shifted_spec;
        }
        match derive_delta_nu(&spec) {
            Ok(_) => assert_ne!(e.name, "nonsplit"),
            Err(CertifyError::NotEligible(_)) => assert_eq!(e.name, "nonsplit"),
            Err(err) => panic!("{}: {err}", e.name),
        }
    }
}
