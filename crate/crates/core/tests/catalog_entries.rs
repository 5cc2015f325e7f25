use hypersoliton::catalog::{self, params, ExpectedVerdict, Params};
use hypersoliton::extrinsic::SurfacePoint;
use hypersoliton::soliton::{self, Verdict};
use hypersoliton::suites;
use hypersoliton::Tolerances;

#[test]
fn every_default_entry_meets_its_expectation() {
    let t = Tolerances::default();
    for e in catalog::list_entries() {
        let rep = suites::verify(e.id, &Params::new(), &t).unwrap();
        assert!(rep.expectation_met, "{}: {:?}", e.id, rep.soliton.verdict);
        match rep.expectation.verdict {
            ExpectedVerdict::Soliton => assert!(rep.soliton.residual_max < 1e-6, "{}", e.id),
            ExpectedVerdict::NotSoliton => assert!(rep.soliton.residual_max > 1e-2, "{}", e.id),
            ExpectedVerdict::Probe => assert!(rep.claim_check.is_some()),
        }
    }
}

#[test]
fn position_is_tangent_on_cones_and_hyperplanes() {
    for (id, p) in [
        ("hyperplane", params([("n", 3.0)])),
        ("cone-flat", params([("n", 2.0)])),
        ("cone-flat", params([("n", 4.0), ("beta", 0.3)])),
    ] {
        let spec = catalog::build(id, &p).unwrap();
        for pt in catalog::safe_grid(id, &p).unwrap() {
            let sp = SurfacePoint::evaluate(&spec, &pt).unwrap();
            assert!(sp.extrinsic.rho.abs() <= 1e-10, "{id}");
        }
    }
}

#[test]
fn free_radius_hypercylinder_is_not_a_soliton() {
    let t = Tolerances::default();
    let p = params([("n", 4.0), ("k", 2.0), ("r", 2.0)]);
    let rep = suites::verify("spherical-hypercylinder", &p, &t).unwrap();
    assert_eq!(rep.expectation.verdict, ExpectedVerdict::NotSoliton);
    assert_eq!(rep.soliton.verdict, Verdict::NotSoliton);
    assert!(rep.expectation_met);
}

#[test]
fn sphere_scan_follows_inverse_square() {
    let t = Tolerances::default();
    let values = suites::scan_values(1.0, 3.0, 5).unwrap();
    let rows = suites::scan("hypersphere", &params([("n", 2.0)]), "r", &values, &t).unwrap();
    for r in rows {
        assert!((r.lambda_star - 1.0 / (r.value * r.value)).abs() < 1e-10);
        assert_eq!(r.verdict, Verdict::Soliton);
    }
    let rows = suites::scan("rotational-case-i", &Params::new(), "b", &suites::scan_values(0.5, 2.0, 4).unwrap(), &t).unwrap();
    assert!(rows.iter().all(|r| r.verdict == Verdict::NotSoliton));
    let rows = suites::scan("spherical-hypercylinder", &params([("n", 5.0)]), "k", &[2.0, 3.0], &t).unwrap();
    assert!(rows.iter().all(|r| (r.lambda_star - 1.0).abs() < 1e-10));
}

#[test]
fn rotational_case_one_quantity_at_the_axis() {
    // n = 3, b = 1, x₁ = 0: the closed form is −1
    let spec = catalog::rotational_case_i(3, 1.0).unwrap();
    let q = soliton::rotational_quantity(&spec, &hypersoliton::ChartPoint::new(vec![0.0, 0.0, 0.0]), 1.0).unwrap();
    assert!((q + 1.0).abs() < 1e-12, "{q}");
}
