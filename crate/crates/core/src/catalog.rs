//! Named, parametrized hypersurfaces with expected soliton behaviour.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::jets::{ChartPoint, Interval, MapSpec, ScalarJet};
use crate::products::{self, constant_profile, sphere_chart_domain, unit_sphere_components};
use crate::sampling;

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamDecl {
    pub name: &'static str,
    pub default: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub integer: bool,
    pub min_exclusive: bool,
    pub doc: &'static str,
}

const fn int_param(name: &'static str, default: f64, min: f64, max: f64, doc: &'static str) -> ParamDecl {
    ParamDecl {
        name,
        default: Some(default),
        min,
        max,
        integer: true,
        min_exclusive: false,
        doc,
    }
}

const fn pos_param(name: &'static str, default: Option<f64>, max: f64, doc: &'static str) -> ParamDecl {
    ParamDecl {
        name,
        default,
        min: 0.0,
        max,
        integer: false,
        min_exclusive: true,
        doc,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedVerdict {
    Soliton,
    NotSoliton,
    /// The numeric oracle decides; a recorded claim is reported alongside.
    Probe,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectation {
    pub verdict: ExpectedVerdict,
    pub lambda: Option<f64>,
    /// `lambda` comes from an independent closed-form computation rather
    /// than a recorded value.
    pub lambda_derived: bool,
    pub source: &'static str,
    pub claim: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryDescriptor {
    pub id: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamDecl>,
    pub source: &'static str,
}

const ENTRY_IDS: [&str; 8] = [
    "circular-hypercylinder",
    "cone-flat",
    "fixture-6-84",
    "hyperplane",
    "hypersphere",
    "rotational-case-i",
    "rotational-case-ii",
    "spherical-hypercylinder",
];

const N_MAX: f64 = 8.0;

fn descriptor(id: &str) -> Option<EntryDescriptor> {
    let n = |default, min| int_param("n", default, min, N_MAX, "hypersurface dimension");
    let d = match id {
        "hyperplane" => EntryDescriptor {
            id: "hyperplane",
            summary: "coordinate hyperplane through the origin",
            params: vec![n(2.0, 1.0)],
            source: "Theorem 6.1 (1)",
        },
        "hypersphere" => EntryDescriptor {
            id: "hypersphere",
            summary: "round hypersphere of radius r centred at the origin",
            params: vec![n(2.0, 1.0), pos_param("r", Some(1.0), 1e3, "radius")],
            source: "Theorem 6.1 (2)",
        },
        "cone-flat" => EntryDescriptor {
            id: "cone-flat",
            summary: "cone over a circle of half-angle beta times a Euclidean factor",
            params: vec![
                n(2.0, 2.0),
                ParamDecl {
                    name: "beta",
                    default: Some(PI / 4.0),
                    min: 0.0,
                    max: PI / 2.0,
                    integer: false,
                    min_exclusive: true,
                    doc: "cone half-angle",
                },
            ],
            source: "Theorem 6.1 (3)",
        },
        "circular-hypercylinder" => EntryDescriptor {
            id: "circular-hypercylinder",
            summary: "S^1(r) x E^(n-1)",
            params: vec![n(3.0, 2.0), pos_param("r", Some(1.0), 1e3, "circle radius")],
            source: "Example 5.1",
        },
        "spherical-hypercylinder" => EntryDescriptor {
            id: "spherical-hypercylinder",
            summary: "S^k(r) x E^(n-k), r = sqrt(k-1) unless given",
            params: vec![
                n(4.0, 2.0),
                int_param("k", 2.0, 1.0, N_MAX - 1.0, "sphere factor dimension, 1 <= k <= n-1"),
                pos_param("r", None, 1e3, "sphere radius; omit for the soliton radius sqrt(k-1)"),
            ],
            source: "Theorem 6.1 (5)",
        },
        "rotational-case-i" => EntryDescriptor {
            id: "rotational-case-i",
            summary: "rotational hypersurface with profile f = sqrt(1 + b^2 x1^2)",
            params: vec![n(3.0, 2.0), pos_param("b", Some(1.0), 100.0, "profile slope")],
            source: "Lemma 4.1 case (i)",
        },
        "rotational-case-ii" => EntryDescriptor {
            id: "rotational-case-ii",
            summary: "rotational hypersurface with profile f = sqrt(b^2 - (x1 - c)^2)",
            params: vec![
                n(3.0, 2.0),
                pos_param("b", Some(2.0), 100.0, "profile radius"),
                ParamDecl {
                    name: "c",
                    default: Some(1.0),
                    min: -100.0,
                    max: 100.0,
                    integer: false,
                    min_exclusive: false,
                    doc: "profile centre offset",
                },
            ],
            source: "Lemma 4.1 case (ii)",
        },
        "fixture-6-84" => EntryDescriptor {
            id: "fixture-6-84",
            summary: "immersion of the twisted product (A + prod cos y)^2 ds^2 + g_S, A constant",
            params: vec![n(3.0, 2.0), pos_param("a", Some(2.0), 100.0, "constant profile A")],
            source: "Theorem 6.1, final case",
        },
        _ => return None,
    };
    Some(d)
}

/// All entries, sorted by id.
pub fn list_entries() -> Vec<EntryDescriptor> {
    ENTRY_IDS.iter().filter_map(|id| descriptor(id)).collect()
}

pub fn descriptor_for(id: &str) -> Result<EntryDescriptor> {
    descriptor(id).ok_or_else(|| {
        GeomError::bad_param("id", format!("unknown catalog entry '{id}' (known: {})", ENTRY_IDS.join(", ")))
    })
}

/// Validates `params` against the entry's declarations and fills defaults.
/// Optional parameters without a default are absent from the result.
pub fn resolve_params(id: &str, params: &Params) -> Result<Params> {
    let d = descriptor_for(id)?;
    for key in params.keys() {
        if !d.params.iter().any(|p| p.name == key) {
            let known: Vec<&str> = d.params.iter().map(|p| p.name).collect();
            return Err(GeomError::bad_param(key, format!("not a parameter of {id} (expected one of {known:?})")));
        }
    }
    let mut out = Params::new();
    for decl in &d.params {
        let Some(v) = params.get(decl.name).copied().or(decl.default) else {
            continue;
        };
        let below = if decl.min_exclusive { v <= decl.min } else { v < decl.min };
        if !v.is_finite() || below || v > decl.max {
            let open = if decl.min_exclusive { "(" } else { "[" };
            return Err(GeomError::bad_param(
                decl.name,
                format!("{v} outside {open}{}, {}]", decl.min, decl.max),
            ));
        }
        if decl.integer && v.fract() != 0.0 {
            return Err(GeomError::bad_param(decl.name, format!("{v} is not an integer")));
        }
        out.insert(decl.name.to_string(), v);
    }
    Ok(out)
}

fn dim(p: &Params) -> usize {
    p["n"] as usize
}

/// Radius of the spherical factor, validating `k < n`.
fn hypercylinder_radius(p: &Params) -> Result<(usize, usize, f64)> {
    let (n, k) = (dim(p), p["k"] as usize);
    if k >= n {
        return Err(GeomError::bad_param("k", format!("need 1 <= k <= n-1, got k = {k}, n = {n}")));
    }
    let r = match p.get("r") {
        Some(&r) => r,
        None if k >= 2 => ((k - 1) as f64).sqrt(),
        None => {
            return Err(GeomError::bad_param(
                "r",
                "k = 1 has no soliton radius; give r explicitly",
            ))
        }
    };
    Ok((n, k, r))
}

pub fn hyperplane(n: usize) -> MapSpec {
    MapSpec::new("hyperplane", n + 1, vec![Interval::new(-2.0, 2.0); n], |x| {
        let mut out = x.to_vec();
        out.push(x[0].constant_like(0.0));
        Ok(out)
    })
}

pub fn hypersphere(n: usize, r: f64) -> MapSpec {
    MapSpec::new(format!("S^{n}({r})"), n + 1, sphere_chart_domain(n), move |x| {
        Ok(unit_sphere_components(x).into_iter().map(|c| &c * r).collect())
    })
}

pub fn cone_flat(n: usize, beta: f64) -> MapSpec {
    let mut domain = vec![Interval::new(0.1, 3.0), Interval::new(-PI, PI)];
    domain.extend(vec![Interval::new(-2.0, 2.0); n - 2]);
    let (sb, cb) = beta.sin_cos();
    MapSpec::new("cone-flat", n + 1, domain, move |x| {
        let t = &x[0];
        let mut out = vec![&(t * &x[1].cos()) * sb, &(t * &x[1].sin()) * sb, t * cb];
        out.extend(x[2..].iter().cloned());
        Ok(out)
    })
}

/// `S^k(r) × E^{n−k}`; the first `k` coordinates are sphere angles.
pub fn sphere_cylinder(n: usize, k: usize, r: f64) -> MapSpec {
    let mut domain = if k == 1 {
        vec![Interval::new(-PI, PI)]
    } else {
        sphere_chart_domain(k)
    };
    domain.extend(vec![Interval::new(-2.0, 2.0); n - k]);
    MapSpec::new(format!("S^{k}({r}) x E^{}", n - k), n + 1, domain, move |x| {
        let mut out: Vec<ScalarJet> = unit_sphere_components(&x[..k]).into_iter().map(|c| &c * r).collect();
        out.extend(x[k..].iter().cloned());
        Ok(out)
    })
}

/// `(x₁, f(x₁)·ξ)` with `ξ` the unit sphere in the angles `x₂…x_n`.
fn rotational(label: String, n: usize, x1: Interval, f: impl Fn(&ScalarJet) -> Result<ScalarJet> + Send + Sync + 'static) -> Result<MapSpec> {
    if n < 2 {
        return Err(GeomError::bad_param("n", "rotational hypersurfaces need n >= 2"));
    }
    let mut domain = vec![x1];
    domain.extend(if n == 2 {
        vec![Interval::new(-PI, PI)]
    } else {
        sphere_chart_domain(n - 1)
    });
    Ok(MapSpec::new(label, n + 1, domain, move |x| {
        let fv = f(&x[0])?;
        let mut out = vec![x[0].clone()];
        out.extend(unit_sphere_components(&x[1..]).into_iter().map(|c| &c * &fv));
        Ok(out)
    }))
}

pub fn rotational_case_i(n: usize, b: f64) -> Result<MapSpec> {
    if !(b > 0.0) {
        return Err(GeomError::bad_param("b", format!("must be positive, got {b}")));
    }
    rotational(format!("rotational-case-i(b={b})"), n, Interval::new(-2.0, 2.0), move |x1| {
        (&(&x1.square() * (b * b)) + 1.0).sqrt()
    })
}

/// Profile `f = √(b² − (x₁ − c)²)` on `x₁ ∈ (c − b, c + b)`.
pub fn rotational_case_ii(n: usize, b: f64, c: f64) -> Result<MapSpec> {
    if !(b > 0.0) {
        return Err(GeomError::bad_param("b", format!("must be positive, got {b}")));
    }
    rotational(format!("rotational-case-ii(b={b},c={c})"), n, Interval::new(c - b, c + b), move |x1| {
        (&(x1 - c).square() * -1.0 + b * b).sqrt()
    })
}

pub fn build(id: &str, params: &Params) -> Result<MapSpec> {
    let p = resolve_params(id, params)?;
    let n = dim(&p);
    match id {
        "hyperplane" => Ok(hyperplane(n)),
        "hypersphere" => Ok(hypersphere(n, p["r"])),
        "cone-flat" => Ok(cone_flat(n, p["beta"])),
        "circular-hypercylinder" => Ok(sphere_cylinder(n, 1, p["r"])),
        "spherical-hypercylinder" => {
            let (n, k, r) = hypercylinder_radius(&p)?;
            Ok(sphere_cylinder(n, k, r))
        }
        "rotational-case-i" => rotational_case_i(n, p["b"]),
        "rotational-case-ii" => rotational_case_ii(n, p["b"], p["c"]),
        "fixture-6-84" => Ok(products::immersion_684(constant_profile(p["a"]), n)?.spec),
        _ => unreachable!("resolve_params rejects unknown ids"),
    }
}

/// Three interior points per coordinate; the rotational case (i) profile
/// axis uses `{0.1, 0.8, 1.5}`.
pub fn safe_grid(id: &str, params: &Params) -> Result<Vec<ChartPoint>> {
    let spec = build(id, params)?;
    let mut axes: Vec<Vec<f64>> = spec
        .domain
        .iter()
        .map(|iv| sampling::interior_axis(*iv, 3, 0.1))
        .collect();
    match id {
        "rotational-case-i" => axes[0] = vec![0.1, 0.8, 1.5],
        "cone-flat" => axes[0] = vec![0.1 + 1e-3, 1.0, 2.5],
        _ => {}
    }
    Ok(sampling::tensor_grid(&axes))
}

pub fn expected_verdict(id: &str, params: &Params) -> Result<Expectation> {
    let p = resolve_params(id, params)?;
    let d = descriptor_for(id)?;
    let soliton = |lambda: f64, derived: bool| Expectation {
        verdict: ExpectedVerdict::Soliton,
        lambda: Some(lambda),
        lambda_derived: derived,
        source: d.source,
        claim: None,
    };
    let not = Expectation {
        verdict: ExpectedVerdict::NotSoliton,
        lambda: None,
        lambda_derived: false,
        source: d.source,
        claim: None,
    };
    Ok(match id {
        "hyperplane" | "cone-flat" => soliton(1.0, false),
        "hypersphere" => soliton((dim(&p) as f64 - 1.0) / (p["r"] * p["r"]), true),
        "spherical-hypercylinder" => {
            let (_, k, r) = hypercylinder_radius(&p)?;
            if k >= 2 && (r * r - (k - 1) as f64).abs() <= 1e-12 {
                soliton(1.0, false)
            } else {
                not
            }
        }
        "rotational-case-i" => not,
        "rotational-case-ii" if p["c"] == 0.0 => soliton((dim(&p) as f64 - 1.0) / (p["b"] * p["b"]), true),
        "rotational-case-ii" | "fixture-6-84" => not,
        "circular-hypercylinder" => Expectation {
            verdict: ExpectedVerdict::Probe,
            lambda: None,
            lambda_derived: false,
            source: d.source,
            claim: Some("S^1(r) x E^(n-1) is also a trivial Ricci soliton"),
        },
        _ => unreachable!("resolve_params rejects unknown ids"),
    })
}

pub fn params<const N: usize>(pairs: [(&str, f64); N]) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extrinsic::SurfacePoint;

    #[test]
    fn listing_is_sorted_and_round_trips() {
        let ids: Vec<&str> = list_entries().iter().map(|e| e.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert_eq!(ids.len(), 8);
        for e in list_entries() {
            assert!(!e.source.is_empty());
            let spec = build(e.id, &Params::new()).unwrap();
            for p in safe_grid(e.id, &Params::new()).unwrap() {
                SurfacePoint::evaluate(&spec, &p).unwrap();
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(build("hypersphere", &params([("r", -1.0)])).is_err());
        assert!(build("hypersphere", &params([("n", 2.5)])).is_err());
        assert!(build("hypersphere", &params([("q", 1.0)])).is_err());
        assert!(build("nope", &Params::new()).is_err());
        assert!(build("spherical-hypercylinder", &params([("n", 3.0), ("k", 3.0)])).is_err());
        assert!(build("spherical-hypercylinder", &params([("n", 3.0), ("k", 1.0)])).is_err());
        assert!(build("spherical-hypercylinder", &params([("n", 3.0), ("k", 1.0), ("r", 1.0)])).is_ok());
    }

    #[test]
    fn hypersphere_normal_points_outward() {
        for n in 1..=5 {
            let spec = hypersphere(n, 2.0);
            let sp = SurfacePoint::evaluate(&spec, &ChartPoint::new(vec![0.2; n])).unwrap();
            assert!((sp.extrinsic.rho - 2.0).abs() < 1e-12, "n = {n}: {}", sp.extrinsic.rho);
        }
    }

    #[test]
    fn hypercylinder_dimensions() {
        let spec = build("spherical-hypercylinder", &params([("n", 4.0), ("k", 2.0)])).unwrap();
        assert_eq!((spec.dim_in, spec.dim_out), (4, 5));
        let v = spec.value_at(&[0.3, 0.4, 1.0, -1.0]).unwrap();
        assert!(((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cone_position_is_tangent() {
        let spec = build("cone-flat", &Params::new()).unwrap();
        for p in safe_grid("cone-flat", &Params::new()).unwrap() {
            let sp = SurfacePoint::evaluate(&spec, &p).unwrap();
            assert!(sp.extrinsic.rho.abs() < 1e-12);
        }
    }

    #[test]
    fn expectations() {
        let e = expected_verdict("hypersphere", &params([("r", 2.0)])).unwrap();
        assert_eq!(e.lambda, Some(0.25));
        let e = expected_verdict("spherical-hypercylinder", &params([("n", 5.0), ("k", 3.0)])).unwrap();
        assert_eq!((e.verdict, e.lambda), (ExpectedVerdict::Soliton, Some(1.0)));
        let e = expected_verdict("circular-hypercylinder", &Params::new()).unwrap();
        assert_eq!(e.verdict, ExpectedVerdict::Probe);
        assert!(e.claim.is_some());
    }
}
