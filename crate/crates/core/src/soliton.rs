//! Ricci soliton defect `½ L_{x^T} g + Ric − λ g` along the tangential
//! position field, global λ fit, and the two-root principal curvature check.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::extrinsic::{clusters, Cluster, SurfacePoint};
use crate::intrinsic;
use crate::jets::{ChartPoint, MapSpec};
use crate::linalg;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonSample {
    pub point: ChartPoint,
    /// `½ L_{x^T} g` from the intrinsic Lie derivative.
    pub lie_half: Array2<f64>,
    /// `g + ρ h`, the same tensor through the concurrent-field identity.
    pub lie_half_concurrent: Array2<f64>,
    pub ricci: Array2<f64>,
    pub g: Array2<f64>,
    pub h_xperp: Array2<f64>,
    /// `(½L + Ric)_ii / g_ii` per chart direction.
    pub lambda_local: Vec<f64>,
    /// `T(e,e)` for each g-orthonormal principal direction, in kappa order.
    pub lambda_principal: Vec<f64>,
    pub kappas: Vec<f64>,
    pub alpha: f64,
    pub rho: f64,
}

impl SolitonSample {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `½ L_{x^T} g + Ric`.
    pub fn soliton_tensor(&self) -> Array2<f64> {
        &self.lie_half + &self.ricci
    }

    pub fn identity_residual(&self) -> f64 {
        linalg::max_abs(&(&self.lie_half - &self.lie_half_concurrent))
    }
}

pub fn sample_surface_point(sp: &SurfacePoint) -> Result<SolitonSample> {
    let n = sp.dim();
    let field = sp.tangential_position_field();
    let lie_half = intrinsic::lie_derivative_metric(&sp.metric, &field)? * 0.5;
    let e = &sp.extrinsic;
    let h_xperp = e.h_xperp();
    let lie_half_concurrent = &sp.metric.g + &h_xperp;
    let ricci = sp.curvature.ricci.clone();
    let t = &lie_half + &ricci;
    let lambda_local = (0..n)
        .map(|i| {
            let gi = sp.metric.g[[i, i]];
            if gi >= 1e-10 {
                t[[i, i]] / gi
            } else {
                f64::NAN
            }
        })
        .collect();
    let dirs = &e.principal_directions;
    let lambda_principal = (0..n)
        .map(|k| {
            let v = dirs.column(k);
            v.dot(&t.dot(&v))
        })
        .collect();
    Ok(SolitonSample {
        point: sp.point.clone(),
        lie_half,
        lie_half_concurrent,
        ricci,
        g: sp.metric.g.clone(),
        h_xperp,
        lambda_local,
        lambda_principal,
        kappas: e.kappas.clone(),
        alpha: e.alpha,
        rho: e.rho,
    })
}

pub fn sample(spec: &MapSpec, point: &ChartPoint) -> Result<SolitonSample> {
    sample_surface_point(&SurfacePoint::evaluate(spec, point)?)
}

/// Max-abs gap between the two computations of `½ L_{x^T} g`.
pub fn identity_check(spec: &MapSpec, point: &ChartPoint) -> Result<f64> {
    Ok(sample(spec, point)?.identity_residual())
}

pub fn sample_grid(spec: &MapSpec, grid: &[ChartPoint]) -> Result<Vec<SolitonSample>> {
    grid.iter().map(|p| sample(spec, p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Soliton,
    NotSoliton,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Soliton => "soliton",
            Verdict::NotSoliton => "not-soliton",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn from_residual(residual: f64, tol: &Tolerances) -> Verdict {
        if residual < tol.accept {
            Verdict::Soliton
        } else if residual > tol.reject {
            Verdict::NotSoliton
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Shrinking,
    Steady,
    Expanding,
}

impl Classification {
    pub fn of(lambda: f64, steady_tol: f64) -> Classification {
        if lambda.abs() <= steady_tol {
            Classification::Steady
        } else if lambda > 0.0 {
            Classification::Shrinking
        } else {
            Classification::Expanding
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Shrinking => "shrinking",
            Classification::Steady => "steady",
            Classification::Expanding => "expanding",
        }
    }
}

/// Range of `T(e,e)` over the grid for the k-th principal direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionLambda {
    pub index: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonReport {
    pub n: usize,
    pub samples: usize,
    pub lambda_star: f64,
    pub residual_max: f64,
    pub verdict: Verdict,
    pub classification: Option<Classification>,
    pub identity_max: f64,
    pub direction_lambdas: Vec<DirectionLambda>,
    pub prop41: Option<Prop41Report>,
}

/// Fits one λ over all samples in g-orthonormal frames and applies the
/// two-threshold verdict.
pub fn fit_lambda(samples: &[SolitonSample], tol: &Tolerances) -> Result<SolitonReport> {
    let first = samples.first().ok_or(GeomError::EmptyGrid(0))?;
    let n = first.dim();
    let mut frames = Vec::with_capacity(samples.len());
    for s in samples {
        if s.dim() != n {
            return Err(GeomError::DimensionMismatch("samples of different dimension".into()));
        }
        let t_hat = linalg::to_orthonormal_frame(&s.soliton_tensor(), &s.g).ok_or(
            GeomError::SingularMetric {
                min_eigenvalue: linalg::min_eigenvalue(&s.g),
            },
        )?;
        frames.push(t_hat);
    }
    let trace_sum: f64 = frames.iter().map(|t| t.diag().sum()).sum();
    let lambda_star = trace_sum / (n * samples.len()) as f64;
    let identity = Array2::<f64>::eye(n);
    let residual_max = frames
        .iter()
        .map(|t| linalg::max_abs(&(t - &(&identity * lambda_star))))
        .fold(0.0, f64::max);
    let identity_max = samples
        .iter()
        .map(SolitonSample::identity_residual)
        .fold(0.0, f64::max);
    let verdict = Verdict::from_residual(residual_max, tol);
    let classification = (verdict == Verdict::Soliton).then(|| Classification::of(lambda_star, tol.steady));
    let direction_lambdas = (0..n)
        .map(|k| {
            let mut d = DirectionLambda {
                index: k,
                kappa_min: f64::INFINITY,
                kappa_max: f64::NEG_INFINITY,
                lambda_min: f64::INFINITY,
                lambda_max: f64::NEG_INFINITY,
            };
            for s in samples {
                d.kappa_min = d.kappa_min.min(s.kappas[k]);
                d.kappa_max = d.kappa_max.max(s.kappas[k]);
                d.lambda_min = d.lambda_min.min(s.lambda_principal[k]);
                d.lambda_max = d.lambda_max.max(s.lambda_principal[k]);
            }
            d
        })
        .collect();
    Ok(SolitonReport {
        n,
        samples: samples.len(),
        lambda_star,
        residual_max,
        verdict,
        classification,
        identity_max,
        direction_lambdas,
        prop41: None,
    })
}

/// Samples every grid point, fits λ and, for certified solitons, attaches
/// the principal curvature check.
pub fn analyze(spec: &MapSpec, grid: &[ChartPoint], tol: &Tolerances) -> Result<SolitonReport> {
    let samples = sample_grid(spec, grid)?;
    let mut report = fit_lambda(&samples, tol)?;
    if report.verdict == Verdict::Soliton {
        report.prop41 = Some(prop41_check(&report, &samples, tol));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop41Point {
    pub clusters: Vec<Cluster>,
    /// `nα + ρ`
    pub trace_term: f64,
    pub roots: Option<[f64; 2]>,
    pub kappa1: f64,
    pub kappa2: f64,
    pub at_most_two: bool,
    pub roots_match: bool,
    pub product_match: bool,
}

impl Prop41Point {
    pub fn ok(&self) -> bool {
        self.at_most_two && self.roots_match && self.product_match
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop41Report {
    pub lambda: f64,
    pub points: Vec<Prop41Point>,
    pub all_ok: bool,
    pub max_root_error: f64,
    pub max_product_error: f64,
}

/// Roots `(s ± √(s² + 4 − 4λ))/2` with `s = nα + ρ`, or `None` when the
/// discriminant is negative beyond `tol`.
pub fn principal_roots(trace_term: f64, lambda: f64, tol: f64) -> Option<[f64; 2]> {
    let disc = trace_term * trace_term + 4.0 - 4.0 * lambda;
    if disc < -tol {
        return None;
    }
    let r = disc.max(0.0).sqrt();
    Some([(trace_term - r) / 2.0, (trace_term + r) / 2.0])
}

/// Checks that clustered principal curvatures form a sub-multiset of the two
/// formula roots and that `κ₁κ₂ = λ − 1`.
pub fn prop41_point(kappas: &[f64], alpha: f64, rho: f64, lambda: f64, tol: &Tolerances) -> (Prop41Point, f64, f64) {
    let n = kappas.len() as f64;
    let cl = clusters(kappas, tol.cluster);
    let trace_term = n * alpha + rho;
    let roots = principal_roots(trace_term, lambda, tol.principal_formula);
    let at_most_two = cl.len() <= 2;
    let (mut kappa1, mut kappa2) = (f64::NAN, f64::NAN);
    let mut root_err = f64::INFINITY;
    if let (Some([r0, r1]), true) = (roots, at_most_two) {
        match cl.as_slice() {
            [one] => {
                let e0 = (one.value - r0).abs();
                let e1 = (one.value - r1).abs();
                root_err = e0.min(e1);
                kappa1 = one.value;
                kappa2 = if e0 <= e1 { r1 } else { r0 };
            }
            [a, b] => {
                root_err = ((a.value - r0).abs().max((b.value - r1).abs()))
                    .min((a.value - r1).abs().max((b.value - r0).abs()));
                kappa1 = a.value;
                kappa2 = b.value;
            }
            _ => {}
        }
    }
    let product_err = (kappa1 * kappa2 - (lambda - 1.0)).abs();
    let point = Prop41Point {
        clusters: cl,
        trace_term,
        roots,
        kappa1,
        kappa2,
        at_most_two,
        roots_match: root_err <= tol.principal_formula,
        product_match: product_err <= tol.principal_formula,
    };
    (point, root_err, product_err)
}

pub fn prop41_check(report: &SolitonReport, samples: &[SolitonSample], tol: &Tolerances) -> Prop41Report {
    let lambda = report.lambda_star;
    let mut points = Vec::with_capacity(samples.len());
    let (mut max_root, mut max_prod) = (0.0_f64, 0.0_f64);
    for s in samples {
        let (p, re, pe) = prop41_point(&s.kappas, s.alpha, s.rho, lambda, tol);
        max_root = max_root.max(re);
        max_prod = max_prod.max(pe);
        points.push(p);
    }
    let all_ok = points.iter().all(Prop41Point::ok);
    Prop41Report {
        lambda,
        points,
        all_ok,
        max_root_error: max_root,
        max_product_error: max_prod,
    }
}

/// Which rotational profile a closed form refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum RotationalCase {
    /// `f = √(1 + b²x₁²)`
    CaseI { b: f64 },
    /// `f = √(b² − (x₁ − c)²)`
    CaseII { b: f64, c: f64 },
}

impl RotationalCase {
    /// Closed form for `(Ric ± ⟨h, x^⊥⟩)(∂₁, ∂₁) / g₁₁`.
    pub fn closed_form(&self, x1: f64) -> f64 {
        match *self {
            RotationalCase::CaseI { b } => {
                let d = 1.0 + b * b * x1 * x1 * (1.0 + b * b);
                -b * b / (d * d)
            }
            RotationalCase::CaseII { b, c } => (2.0 - b * b + c * c - c * x1) / (b * b),
        }
    }

    pub fn build(&self, n: usize) -> Result<MapSpec> {
        match *self {
            RotationalCase::CaseI { b } => crate::catalog::rotational_case_i(n, b),
            RotationalCase::CaseII { b, c } => crate::catalog::rotational_case_ii(n, b, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrosscheckRow {
    pub n: usize,
    /// +1 for `Ric + ⟨h, x^⊥⟩`, −1 for `Ric − ⟨h, x^⊥⟩`.
    pub sign: i32,
    pub max_abs_diff: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationalCrosscheck {
    pub case: RotationalCase,
    pub x1_grid: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub rows: Vec<CrosscheckRow>,
    /// `(n, sign)` pairs agreeing within tolerance.
    pub selected: Vec<(usize, i32)>,
}

/// Numeric `(Ric + sign·ρh)₁₁ / g₁₁` at a point of a rotational chart.
pub fn rotational_quantity(spec: &MapSpec, point: &ChartPoint, sign: f64) -> Result<f64> {
    let sp = SurfacePoint::evaluate(spec, point)?;
    let e = &sp.extrinsic;
    Ok((sp.curvature.ricci[[0, 0]] + sign * e.rho * e.h[[0, 0]]) / sp.metric.g[[0, 0]])
}

/// Compares the closed form against the numeric quantity for each sign
/// convention and each dimension in `dims`, at the profile points `x1_grid`
/// (all angular coordinates zero).
pub fn formula_crosscheck_rotational(
    case: RotationalCase,
    x1_grid: &[f64],
    dims: &[usize],
    tol: f64,
) -> Result<RotationalCrosscheck> {
    let closed_form: Vec<f64> = x1_grid.iter().map(|&x| case.closed_form(x)).collect();
    let mut rows = Vec::new();
    for &n in dims {
        let spec = case.build(n)?;
        for sign in [1, -1] {
            let mut worst = 0.0_f64;
            for (&x1, &want) in x1_grid.iter().zip(&closed_form) {
                let mut coords = vec![0.0; n];
                coords[0] = x1;
                let q = rotational_quantity(&spec, &ChartPoint::new(coords), sign as f64)?;
                worst = worst.max((q - want).abs());
            }
            rows.push(CrosscheckRow {
                n,
                sign,
                max_abs_diff: worst,
                matches: worst <= tol,
            });
        }
    }
    let selected = rows.iter().filter(|r| r.matches).map(|r| (r.n, r.sign)).collect();
    Ok(RotationalCrosscheck {
        case,
        x1_grid: x1_grid.to_vec(),
        closed_form,
        rows,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Interval;
    use std::f64::consts::PI;

    fn plane() -> MapSpec {
        MapSpec::new(
            "plane",
            3,
            vec![Interval::new(-5.0, 5.0), Interval::new(-5.0, 5.0)],
            |x| Ok(vec![x[0].clone(), x[1].clone(), x[0].constant_like(0.0)]),
        )
    }

    fn sphere(r: f64) -> MapSpec {
        let lim = PI / 2.0 - 1e-2;
        MapSpec::new(
            "sphere",
            3,
            vec![Interval::new(-lim, lim), Interval::new(-PI, PI)],
            move |x| {
                Ok(vec![
                    &x[0].sin() * r,
                    &(&x[0].cos() * &x[1].sin()) * r,
                    &(&x[0].cos() * &x[1].cos()) * r,
                ])
            },
        )
    }

    fn grid() -> Vec<ChartPoint> {
        let mut g = Vec::new();
        for a in [-0.5, 0.0, 0.7] {
            for b in [-1.0, 0.2, 2.0] {
                g.push(ChartPoint::new(vec![a, b]));
            }
        }
        g
    }

    #[test]
    fn plane_through_origin_has_lambda_one() {
        let s = sample(&plane(), &ChartPoint::new(vec![1.0, -2.0])).unwrap();
        assert!(linalg::max_abs(&(&s.lie_half - &s.g)) < 1e-14);
        assert!(linalg::max_abs(&s.ricci) < 1e-14);
        assert!(s.lambda_local.iter().all(|l| (l - 1.0).abs() < 1e-14));
        let rep = analyze(&plane(), &grid(), &Tolerances::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Soliton);
        assert_eq!(rep.classification, Some(Classification::Shrinking));
        assert!(rep.prop41.unwrap().all_ok);
    }

    #[test]
    fn sphere_radius_two_quarter() {
        let s = sample(&sphere(2.0), &ChartPoint::new(vec![0.3, 0.4])).unwrap();
        assert!(linalg::max_abs(&s.lie_half) < 1e-13);
        assert!(s.identity_residual() < 1e-13);
        let rep = analyze(&sphere(2.0), &grid(), &Tolerances::default()).unwrap();
        assert!((rep.lambda_star - 0.25).abs() < 1e-12);
        let p = rep.prop41.unwrap();
        assert!(p.all_ok, "{p:?}");
    }

    #[test]
    fn identical_samples_reproduce_pointwise_value() {
        let s = sample(&sphere(1.5), &ChartPoint::new(vec![0.1, 0.1])).unwrap();
        let rep = fit_lambda(&[s.clone(), s.clone(), s], &Tolerances::default()).unwrap();
        assert!((rep.lambda_star - 1.0 / 2.25).abs() < 1e-13);
    }

    #[test]
    fn empty_grid_is_an_error() {
        assert!(matches!(fit_lambda(&[], &Tolerances::default()), Err(GeomError::EmptyGrid(0))));
    }

    #[test]
    fn verdict_thresholds() {
        let t = Tolerances::default();
        assert_eq!(Verdict::from_residual(1e-7, &t), Verdict::Soliton);
        assert_eq!(Verdict::from_residual(1e-3, &t), Verdict::Inconclusive);
        assert_eq!(Verdict::from_residual(0.5, &t), Verdict::NotSoliton);
        assert_eq!(Classification::of(1e-10, 1e-9), Classification::Steady);
        assert_eq!(Classification::of(-1e-3, 1e-9), Classification::Expanding);
    }

    #[test]
    fn principal_roots_for_cylinder_and_umbilic_sphere() {
        let t = Tolerances::default();
        // S²(1)×E¹ with inward data: κ = {1, 1, 0}, α = 2/3, ρ = −1
        let (p, _, _) = prop41_point(&[0.0, 1.0, 1.0], 2.0 / 3.0, -1.0, 1.0, &t);
        assert_eq!(p.roots, Some([0.0, 1.0]));
        assert!(p.ok());
        // S³(√2) outward: κ = −1/√2 thrice, ρ = √2, λ = 1
        let k = -1.0 / 2f64.sqrt();
        let (p, _, _) = prop41_point(&[k, k, k], k, 2f64.sqrt(), 1.0, &t);
        assert!(p.ok(), "{p:?}");
        assert!(p.kappa2.abs() < 1e-15);
        let (p, _, _) = prop41_point(&[-1.0, 0.0, 2.0], 1.0 / 3.0, 0.0, 1.0, &t);
        assert!(!p.at_most_two && !p.ok());
    }

    #[test]
    fn closed_form_values() {
        let i = RotationalCase::CaseI { b: 1.0 };
        assert_eq!(i.closed_form(0.0), -1.0);
        assert!((i.closed_form(1.0) + 1.0 / 9.0).abs() < 1e-15);
        let ii = RotationalCase::CaseII { b: 2.0, c: 0.0 };
        assert_eq!(ii.closed_form(0.3), -0.5);
        let ii = RotationalCase::CaseII { b: 2.0, c: 1.0 };
        assert_eq!(ii.closed_form(0.0), -0.25);
        assert_eq!(ii.closed_form(1.0), -0.5);
    }
}
