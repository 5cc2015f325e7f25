//! Hypersurface geometry of an immersion into Euclidean (n+1)-space.
//!
//! The unit normal is the one making `(∂_1 L, …, ∂_n L, N)` a positively
//! oriented ambient frame. `h_ij = ⟨∂_i∂_j L, N⟩`, `A = g⁻¹h`.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::intrinsic::{self, ChristoffelData, CurvatureData, MetricData, TangentField};
use crate::jets::{lift_immersion, ChartPoint, Jet3, MapSpec};
use crate::linalg;
use crate::tolerances::Tolerances;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Induced metric `g_ij = ⟨∂_i L, ∂_j L⟩` with exact first and second partials.
pub fn metric_from_jet(jet: &Jet3) -> MetricData {
    let n = jet.dim_in;
    let d1: Vec<Vec<f64>> = (0..n).map(|i| jet.partial(i)).collect();
    let mut d2 = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            d2[i][j] = jet.partial2(i, j);
        }
    }
    let mut g = Array2::zeros((n, n));
    let mut dg = ndarray::Array3::zeros((n, n, n));
    let mut d2g = ndarray::Array4::zeros((n, n, n, n));
    for i in 0..n {
        for j in i..n {
            let v = dot(&d1[i], &d1[j]);
            g[[i, j]] = v;
            g[[j, i]] = v;
            for k in 0..n {
                let dv = dot(&d2[i][k], &d1[j]) + dot(&d1[i], &d2[j][k]);
                dg[[k, i, j]] = dv;
                dg[[k, j, i]] = dv;
                for l in k..n {
                    let ddv = dot(&jet.partial3(i, k, l), &d1[j])
                        + dot(&d2[i][k], &d2[j][l])
                        + dot(&d2[i][l], &d2[j][k])
                        + dot(&d1[i], &jet.partial3(j, k, l));
                    for (a, b) in [(l, k), (k, l)] {
                        d2g[[a, b, i, j]] = ddv;
                        d2g[[a, b, j, i]] = ddv;
                    }
                }
            }
        }
    }
    MetricData { n, g, dg, d2g }
}

/// Positively oriented unit normal via cofactors of the Jacobian.
pub fn unit_normal(jet: &Jet3) -> Result<Vec<f64>> {
    let n = jet.dim_in;
    if jet.dim_out != n + 1 {
        return Err(GeomError::DimensionMismatch(format!(
            "hypersurface needs {} ambient components, got {}",
            n + 1,
            jet.dim_out
        )));
    }
    let mut cof = vec![0.0; n + 1];
    for (a, c) in cof.iter_mut().enumerate() {
        let minor = Array2::from_shape_fn((n, n), |(r, i)| {
            let row = if r < a { r } else { r + 1 };
            jet.d1(row, i)
        });
        let sign = if (a + n) % 2 == 0 { 1.0 } else { -1.0 };
        *c = sign * linalg::determinant(&minor);
    }
    let norm = dot(&cof, &cof).sqrt();
    if !(norm > 0.0) {
        return Err(GeomError::RankDeficient { min_singular: 0.0 });
    }
    Ok(cof.into_iter().map(|c| c / norm).collect())
}

/// A group of principal curvatures within the clustering tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Groups ascending values whose consecutive gaps are within `tol`.
pub fn clusters(sorted: &[f64], tol: f64) -> Vec<Cluster> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &k in sorted {
        match out.last_mut() {
            Some((sum, count, last)) if (k - *last).abs() <= tol => {
                *sum += k;
                *count += 1;
                *last = k;
            }
            _ => out.push((k, 1, k)),
        }
    }
    out.into_iter()
        .map(|(sum, count, _)| Cluster {
            value: sum / count as f64,
            multiplicity: count,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtrinsicData {
    pub position: Vec<f64>,
    pub normal: Vec<f64>,
    pub h: Array2<f64>,
    pub shape: Array2<f64>,
    /// Ascending principal curvatures.
    pub kappas: Vec<f64>,
    /// g-orthonormal principal directions, one column per curvature.
    pub principal_directions: Array2<f64>,
    pub alpha: f64,
    /// Support function ⟨x, N⟩; the normal part of x is `rho · N`.
    pub rho: f64,
    pub x_tangent: Vec<f64>,
}

impl ExtrinsicData {
    /// Same point with the opposite unit normal.
    pub fn flipped(&self) -> ExtrinsicData {
        let n = self.kappas.len();
        let mut dirs = self.principal_directions.clone();
        for (col, src) in (0..n).rev().enumerate() {
            for r in 0..n {
                dirs[[r, col]] = self.principal_directions[[r, src]];
            }
        }
        ExtrinsicData {
            position: self.position.clone(),
            normal: self.normal.iter().map(|x| -x).collect(),
            h: -&self.h,
            shape: -&self.shape,
            kappas: self.kappas.iter().rev().map(|k| -k).collect(),
            principal_directions: dirs,
            alpha: -self.alpha,
            rho: -self.rho,
            x_tangent: self.x_tangent.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.kappas.len()
    }

    pub fn clusters(&self, tol: f64) -> Vec<Cluster> {
        clusters(&self.kappas, tol)
    }

    /// `ρ · h`, i.e. `⟨h(·,·), x^⊥⟩`.
    pub fn h_xperp(&self) -> Array2<f64> {
        &self.h * self.rho
    }
}

fn extrinsic_from(jet: &Jet3, metric: &MetricData) -> Result<ExtrinsicData> {
    let n = jet.dim_in;
    let normal = unit_normal(jet)?;
    let position = jet.value();
    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = dot(&jet.partial2(i, j), &normal);
            h[[i, j]] = v;
            h[[j, i]] = v;
        }
    }
    let g_inv = metric.inverse()?;
    let shape = g_inv.dot(&h);
    let (vals, dirs) = linalg::generalized_eigen(&h, &metric.g).ok_or(GeomError::SingularMetric {
        min_eigenvalue: linalg::min_eigenvalue(&metric.g),
    })?;
    let kappas = vals.to_vec();
    let alpha = kappas.iter().sum::<f64>() / n as f64;
    let rho = dot(&position, &normal);
    let b: Vec<f64> = (0..n).map(|i| dot(&position, &jet.partial(i))).collect();
    let x_tangent = linalg::spd_solve(&metric.g, &b).ok_or(GeomError::SingularMetric {
        min_eigenvalue: linalg::min_eigenvalue(&metric.g),
    })?;
    Ok(ExtrinsicData {
        position,
        normal,
        h,
        shape,
        kappas,
        principal_directions: dirs,
        alpha,
        rho,
        x_tangent,
    })
}

/// Everything the soliton pipeline needs at one chart point.
#[derive(Debug, Clone)]
pub struct SurfacePoint {
    pub point: ChartPoint,
    pub jet: Jet3,
    pub metric: MetricData,
    pub christoffel: ChristoffelData,
    pub curvature: CurvatureData,
    pub extrinsic: ExtrinsicData,
}

impl SurfacePoint {
    pub fn evaluate(spec: &MapSpec, point: &ChartPoint) -> Result<SurfacePoint> {
        let tol = Tolerances::default();
        if spec.dim_out != spec.dim_in + 1 {
            return Err(GeomError::DimensionMismatch(format!(
                "{} is not a hypersurface map ({} -> {})",
                spec.label, spec.dim_in, spec.dim_out
            )));
        }
        let jet = lift_immersion(spec, point)?;
        let metric = metric_from_jet(&jet);
        let min_eig = linalg::min_eigenvalue(&metric.g);
        let min_singular = min_eig.max(0.0).sqrt();
        if !(min_singular > tol.rank) {
            return Err(GeomError::RankDeficient { min_singular });
        }
        metric.validate(tol.positive_definite)?;
        let christoffel = intrinsic::christoffel(&metric)?;
        let curvature = intrinsic::curvature(&metric, &christoffel)?;
        let extrinsic = extrinsic_from(&jet, &metric)?;
        Ok(SurfacePoint {
            point: point.clone(),
            jet,
            metric,
            christoffel,
            curvature,
            extrinsic,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.n
    }

    /// Chart components of x^T and their first partials.
    pub fn tangential_position_field(&self) -> TangentField {
        let n = self.dim();
        let x = &self.extrinsic.position;
        let b: Vec<f64> = (0..n).map(|l| dot(x, &self.jet.partial(l))).collect();
        let gi = &self.christoffel.g_inv;
        let dgi = &self.christoffel.dg_inv;
        let mut partials = Array2::zeros((n, n));
        for i in 0..n {
            for k in 0..n {
                let mut v = if i == k { 1.0 } else { 0.0 };
                for l in 0..n {
                    v += dgi[[i, k, l]] * b[l] + gi[[k, l]] * dot(x, &self.jet.partial2(i, l));
                }
                partials[[i, k]] = v;
            }
        }
        TangentField {
            comps: self.extrinsic.x_tangent.clone(),
            partials,
        }
    }

    /// `(∇̄_i h)_{jk}` from the order-three jet and the Weingarten formula.
    pub fn covariant_h(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        let e = &self.extrinsic;
        let gamma = &self.christoffel.gamma;
        let mut dh = dot(&self.jet.partial3(i, j, k), &e.normal);
        let pjk = self.jet.partial2(j, k);
        for l in 0..n {
            dh -= e.shape[[l, i]] * dot(&pjk, &self.jet.partial(l));
        }
        for l in 0..n {
            dh -= gamma[[l, i, j]] * e.h[[l, k]] + gamma[[l, i, k]] * e.h[[j, l]];
        }
        dh
    }

    pub fn codazzi(&self, i: usize, j: usize, k: usize) -> f64 {
        (self.covariant_h(i, j, k) - self.covariant_h(j, i, k)).abs()
    }

    pub fn codazzi_max(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    worst = worst.max(self.codazzi(i, j, k));
                }
            }
        }
        worst
    }

    /// Max |x − (Σ xT^i ∂_i L + ρ N)| over ambient components.
    pub fn reconstruction_residual(&self) -> f64 {
        let e = &self.extrinsic;
        let mut worst = 0.0_f64;
        for a in 0..e.position.len() {
            let mut v = e.rho * e.normal[a];
            for i in 0..self.dim() {
                v += e.x_tangent[i] * self.jet.d1(a, i);
            }
            worst = worst.max((v - e.position[a]).abs());
        }
        worst
    }
}

pub fn extrinsic_data(spec: &MapSpec, point: &ChartPoint) -> Result<ExtrinsicData> {
    Ok(SurfacePoint::evaluate(spec, point)?.extrinsic)
}

/// Ricci tensor from the contracted Gauss equation in flat ambient space:
/// `Ric(X,Y) = (tr A)⟨AX,Y⟩ − ⟨AX,AY⟩`.
pub fn gauss_equation_ricci(e: &ExtrinsicData, g: &Array2<f64>) -> Result<Array2<f64>> {
    let g_inv = linalg::spd_inverse(g).ok_or(GeomError::SingularMetric {
        min_eigenvalue: linalg::min_eigenvalue(g),
    })?;
    let trace: f64 = (0..e.dim()).map(|i| e.shape[[i, i]]).sum();
    let h_gi_h = e.h.dot(&g_inv).dot(&e.h);
    let mut ric = &e.h * trace - h_gi_h;
    let n = e.dim();
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (ric[[i, j]] + ric[[j, i]]);
            ric[[i, j]] = s;
            ric[[j, i]] = s;
        }
    }
    Ok(ric)
}

pub fn codazzi_residual(spec: &MapSpec, point: &ChartPoint, i: usize, j: usize, k: usize) -> Result<f64> {
    Ok(SurfacePoint::evaluate(spec, point)?.codazzi(i, j, k))
}

/// Tangential chart components of the position vector and the support function.
pub fn position_split(spec: &MapSpec, point: &ChartPoint) -> Result<(Vec<f64>, f64)> {
    let e = extrinsic_data(spec, point)?;
    Ok((e.x_tangent, e.rho))
}
