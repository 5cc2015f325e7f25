//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;

use hypersoliton::catalog::{self, params};
use hypersoliton::extrinsic::SurfacePoint;
use hypersoliton::products::{self, constant_profile, random_product, ProductKind};
use hypersoliton::sampling;
use hypersoliton::soliton::{self, Classification, RotationalCase, Verdict};
use hypersoliton::suites::{self, IdentitySuiteConfig, VerifyReport};
use hypersoliton::{ChartPoint, Result, Tolerances};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn verify(id: &str, p: catalog::Params) -> Result<VerifyReport> {
    suites::verify(id, &p, &Tolerances::default())
}

fn identity_check(name: &str, tol: f64) -> Result<Outcome> {
    let rep = suites::identity_suite(&IdentitySuiteConfig::default(), &Tolerances::default())?;
    let c = rep.check(name).expect("suite check present");
    outcome(
        rep.points == 100 && c.max <= tol,
        format!("{} points on {} graphs, max {:.3e} (limit {tol:.0e})", rep.points, rep.surfaces.len(), c.max),
    )
}

fn c04() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, k) in [(3.0, 2.0), (4.0, 2.0), (4.0, 3.0), (5.0, 4.0)] {
        let r = verify("spherical-hypercylinder", params([("n", n), ("k", k)]))?;
        let s = &r.soliton;
        ok &= (s.lambda_star - 1.0).abs() <= 1e-6
            && s.residual_max < 1e-6
            && s.classification == Some(Classification::Shrinking);
        parts.push(format!("({n},{k}) λ*={:.10} res={:.1e}", s.lambda_star, s.residual_max));
    }
    outcome(ok, parts.join("; "))
}

fn c05() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, r) in [(2.0, 1.0), (2.0, 2.0), (3.0, 2.0), (4.0, 3f64.sqrt())] {
        let rep = verify("hypersphere", params([("n", n), ("r", r)]))?;
        let s = &rep.soliton;
        // scalar curvature n(n−1)/r² split evenly: Ric = (n−1)/r² g, x^T = 0
        let oracle = (n - 1.0) / (r * r);
        ok &= s.verdict == Verdict::Soliton
            && (s.lambda_star - oracle).abs() <= 1e-8
            && s.classification == Some(Classification::Shrinking);
        parts.push(format!("({n},{r:.4}) |Δλ|={:.1e}", (s.lambda_star - oracle).abs()));
    }
    outcome(ok, parts.join("; "))
}

fn c06() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    let cases = [
        ("hyperplane", params([("n", 2.0)])),
        ("hyperplane", params([("n", 3.0)])),
        ("cone-flat", params([("n", 2.0), ("beta", FRAC_PI_4)])),
        ("cone-flat", params([("n", 3.0), ("beta", FRAC_PI_4)])),
    ];
    for (id, p) in cases {
        let n = p["n"];
        let s = verify(id, p)?.soliton;
        ok &= (s.lambda_star - 1.0).abs() <= 1e-8 && s.residual_max < 1e-8;
        parts.push(format!("{id} n={n} |Δλ|={:.1e} res={:.1e}", (s.lambda_star - 1.0).abs(), s.residual_max));
    }
    outcome(ok, parts.join("; "))
}

fn c07() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for b in [0.5, 1.0, 2.0] {
        let s = verify("rotational-case-i", params([("n", 3.0), ("b", b)]))?.soliton;
        ok &= s.residual_max > 1e-2 && s.verdict == Verdict::NotSoliton;
        parts.push(format!("b={b} res={:.3}", s.residual_max));
    }
    let case = RotationalCase::CaseI { b: 1.0 };
    ok &= (case.closed_form(0.0) + 1.0).abs() < 1e-15 && (case.closed_form(1.0) + 1.0 / 9.0).abs() < 1e-15;
    let x = soliton::formula_crosscheck_rotational(case, &[0.0, 1.0], &[2, 3, 4], 1e-6)?;
    ok &= !x.selected.is_empty();
    parts.push(format!("closed form matched by (n, sign) {:?}", x.selected));
    outcome(ok, parts.join("; "))
}

/// Sorted principal curvatures, α and ρ with the normal chosen so ρ ≥ 0.
fn oriented_invariants(sp: &SurfacePoint) -> (Vec<f64>, f64, f64) {
    let e = if sp.extrinsic.rho < 0.0 {
        sp.extrinsic.flipped()
    } else {
        sp.extrinsic.clone()
    };
    (e.kappas.to_vec(), e.alpha, e.rho)
}

fn c08() -> Result<Outcome> {
    let p0 = params([("n", 3.0), ("b", 2.0), ("c", 0.0)]);
    let rot = catalog::build("rotational-case-ii", &p0)?;
    let sph = catalog::build("hypersphere", &params([("n", 3.0), ("r", 2.0)]))?;
    let reference = oriented_invariants(&SurfacePoint::evaluate(&sph, &ChartPoint::new(vec![0.3, 0.2, -0.4]))?);
    let mut diff = 0.0_f64;
    for p in catalog::safe_grid("rotational-case-ii", &p0)? {
        let (k, a, r) = oriented_invariants(&SurfacePoint::evaluate(&rot, &p)?);
        for (x, y) in k.iter().zip(&reference.0) {
            diff = diff.max((x - y).abs());
        }
        diff = diff.max((a - reference.1).abs()).max((r - reference.2).abs());
    }
    let s0 = verify("rotational-case-ii", p0)?.soliton;
    let s_sph = verify("hypersphere", params([("n", 3.0), ("r", 2.0)]))?.soliton;
    diff = diff.max((s0.lambda_star - s_sph.lambda_star).abs());
    let s1 = verify("rotational-case-ii", params([("n", 3.0), ("b", 2.0), ("c", 1.0)]))?.soliton;
    let case = RotationalCase::CaseII { b: 2.0, c: 1.0 };
    let closed = (case.closed_form(0.0) + 0.25).abs() < 1e-15 && (case.closed_form(1.0) + 0.5).abs() < 1e-15;
    let x = soliton::formula_crosscheck_rotational(case, &[0.0, 1.0], &[2, 3, 4], 1e-6)?;
    outcome(
        diff <= 1e-8 && s0.verdict == Verdict::Soliton && s1.verdict == Verdict::NotSoliton && closed && !x.selected.is_empty(),
        format!(
            "c=0 vs sphere max diff {diff:.1e}; c=1 res={:.3} verdict {}; closed form matched by {:?}",
            s1.residual_max,
            s1.verdict.as_str(),
            x.selected
        ),
    )
}

fn certified() -> Result<Vec<(String, VerifyReport)>> {
    let mut out = Vec::new();
    for (id, p) in suites::acceptance_corpus() {
        let label = format!("{id}{:?}", p.values().collect::<Vec<_>>());
        let r = verify(id, p)?;
        if r.soliton.verdict == Verdict::Soliton {
            out.push((label, r));
        }
    }
    Ok(out)
}

fn c09() -> Result<Outcome> {
    let cert = certified()?;
    let mut ok = !cert.is_empty();
    let (mut root, mut prod) = (0.0_f64, 0.0_f64);
    for (_, r) in &cert {
        let p = r.soliton.prop41.as_ref().expect("certified soliton carries the check");
        ok &= p.all_ok;
        root = root.max(p.max_root_error);
        prod = prod.max(p.max_product_error);
    }
    ok &= root <= 1e-6 && prod <= 1e-6;
    outcome(
        ok,
        format!("{} certified solitons, max root error {root:.1e}, max κ₁κ₂ error {prod:.1e}", cert.len()),
    )
}

fn c10() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    for id in ["(6.37)", "(6.55)", "(6.57)", "(6.73)"] {
        let fx = products::connection_fixture(id)?;
        let d = products::fixture_connection_tables(&fx, &fx.grid(20, 11))?;
        ok &= d <= 1e-8;
        parts.push(format!("{id} {d:.1e}"));
    }
    let a = products::warped_sectional_residual(20, 11)?;
    let b = products::twisted_sectional_residual(20, 11)?;
    ok &= a <= 1e-8 && b <= 1e-8;
    parts.push(format!("(6.58) {a:.1e}"));
    parts.push(format!("(6.76) {b:.1e}"));
    outcome(ok, parts.join("; "))
}

fn c11() -> Result<Outcome> {
    let im = products::immersion_684(constant_profile(2.0), 3)?;
    let d = im.metric_discrepancy(&im.default_grid())?;
    let ric = im.ricci_y2(&[0.3, 0.0, 0.0])?;
    let s = verify("fixture-6-84", params([("n", 3.0), ("a", 2.0)]))?.soliton;
    outcome(
        d <= 1e-8 && (ric - 4.0 / 3.0).abs() <= 1e-8 && s.verdict == Verdict::NotSoliton,
        format!(
            "metric {d:.1e}; Ric(∂y₂,∂y₂) = {ric:.12}; residual {:.3} verdict {}",
            s.residual_max,
            s.verdict.as_str()
        ),
    )
}

fn c12() -> Result<Outcome> {
    let sw = suites::g_family_sweep(2, 50, 7)?;
    outcome(
        sw.eikonal_min_of_min > 1e-4,
        format!(
            "50 tuples: smallest grid-minimum {:.3e}, smallest grid-maximum {:.3e}",
            sw.eikonal_min_of_min, sw.eikonal_min_of_max
        ),
    )
}

fn c13() -> Result<Outcome> {
    let tol = Tolerances::default();
    let mut rng = sampling::rng(13);
    let mut wrong = Vec::new();
    let kinds = [
        ProductKind::Direct,
        ProductKind::Warped,
        ProductKind::Twisted,
        ProductKind::DoublyWarped,
        ProductKind::TwistedWarped,
    ];
    for kind in kinds {
        for i in 0..10 {
            let spec = random_product(kind, &mut rng);
            match products::classify_product(&spec, &products::product_grid(&spec), &tol) {
                Ok(c) if c.kind == kind => {}
                Ok(c) => wrong.push(format!("{kind}#{i} → {}", c.kind)),
                Err(e) => wrong.push(format!("{kind}#{i} → {e}")),
            }
        }
    }
    outcome(wrong.is_empty(), format!("50 constructions, misclassified: {wrong:?}"))
}

fn c14() -> Result<Outcome> {
    let cert = certified()?;
    let min = cert.iter().map(|(_, r)| r.soliton.lambda_star).fold(f64::INFINITY, f64::min);
    let bad: Vec<&str> = cert
        .iter()
        .filter(|(_, r)| !(r.soliton.lambda_star > 1e-9))
        .map(|(l, _)| l.as_str())
        .collect();
    outcome(
        bad.is_empty() && !cert.is_empty(),
        format!("{} certified solitons, smallest λ* = {min:.6}; offending: {bad:?}", cert.len()),
    )
}

fn c15() -> Result<Outcome> {
    let r = verify("circular-hypercylinder", params([("n", 3.0), ("r", 1.0)]))?;
    let Some(c) = &r.claim_check else {
        return outcome(false, "no claim block");
    };
    // S¹(1) direction: g + ρh = 1 − 1 = 0 and Ric = 0; line directions: g = 1.
    let near = |v: f64| c.direction_lambdas.iter().any(|d| (d.lambda_min - v).abs() < 1e-8 && (d.lambda_max - v).abs() < 1e-8);
    let complete = c.source.contains("Example 5.1") && !c.claim.is_empty() && c.direction_lambdas.len() == 3 && !c.note.is_empty();
    let consistent = near(0.0) && near(1.0) && c.oracle_verdict == Verdict::NotSoliton && !c.claim_supported;
    outcome(
        complete && consistent && r.expectation_met,
        format!(
            "claim '{}' ({}); oracle verdict {} with direction λ ranges {:?}",
            c.claim,
            c.source,
            c.oracle_verdict.as_str(),
            c.direction_lambdas.iter().map(|d| (d.lambda_min, d.lambda_max)).collect::<Vec<_>>()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 15] = [
        ("concurrent-field identity", || identity_check("concurrent-identity", 1e-7)),
        ("Gauss equation consistency", || identity_check("gauss-equation", 1e-6)),
        ("Codazzi residual", || identity_check("codazzi", 1e-7)),
        ("spherical hypercylinders λ = 1", c04),
        ("hyperspheres λ = (n−1)/r²", c05),
        ("hyperplane and flat cone λ = 1", c06),
        ("rotational case (i)", c07),
        ("rotational case (ii)", c08),
        ("two principal curvature clusters", c09),
        ("connection and sectional fixtures", c10),
        ("twisted immersion", c11),
        ("G-family eikonal probe", c12),
        ("product foliation classifier", c13),
        ("no steady or expanding soliton certified", c14),
        ("circular hypercylinder claim vs oracle", c15),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("criterion {:>2} {}: {name} | {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
