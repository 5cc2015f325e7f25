//! Intrinsic Riemannian geometry at a single chart point: Christoffel
//! symbols, curvature, Lie derivative of the metric, gradient and Hessian.
//!
//! Curvature convention: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`,
//! `R_{ijkl} = g(R(∂_i,∂_j)∂_k, ∂_l)` and `Ric_{jk} = R^i_{ijk}`, so the
//! unit round sphere has sectional curvature +1.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, Array3, Array4};

use crate::error::{GeomError, Result};
use crate::jets::{ChartPoint, Interval, ScalarJet};
use crate::linalg;
use crate::tolerances::Tolerances;

/// Metric components with first and second partials at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricData {
    pub n: usize,
    pub g: Array2<f64>,
    /// `dg[[k, i, j]] = ∂_k g_ij`
    pub dg: Array3<f64>,
    /// `d2g[[l, k, i, j]] = ∂_l ∂_k g_ij`
    pub d2g: Array4<f64>,
}

impl MetricData {
    /// Assemble from row-major `n × n` component jets.
    pub fn from_component_jets(n: usize, entries: &[ScalarJet]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(GeomError::DimensionMismatch(format!(
                "{} metric entries for dimension {n}",
                entries.len()
            )));
        }
        let mut g = Array2::zeros((n, n));
        let mut dg = Array3::zeros((n, n, n));
        let mut d2g = Array4::zeros((n, n, n, n));
        for i in 0..n {
            for j in 0..n {
                let e = &entries[i * n + j];
                g[[i, j]] = e.value();
                for k in 0..n {
                    dg[[k, i, j]] = e.d1(k);
                    for l in 0..n {
                        d2g[[l, k, i, j]] = e.d2(l, k);
                    }
                }
            }
        }
        Ok(MetricData { n, g, dg, d2g })
    }

    /// Checks symmetry and positive definiteness.
    pub fn validate(&self, eps_pd: f64) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                let scale = 1.0 + self.g[[i, i]].abs() + self.g[[j, j]].abs();
                if (self.g[[i, j]] - self.g[[j, i]]).abs() > 1e-12 * scale {
                    return Err(GeomError::DimensionMismatch(format!(
                        "metric not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if self.g.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::SingularMetric {
                min_eigenvalue: f64::NAN,
            });
        }
        let min = linalg::min_eigenvalue(&self.g);
        if !(min > eps_pd) {
            return Err(GeomError::SingularMetric { min_eigenvalue: min });
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Array2<f64>> {
        linalg::spd_inverse(&self.g).ok_or(GeomError::SingularMetric {
            min_eigenvalue: linalg::min_eigenvalue(&self.g),
        })
    }
}

pub type MetricEvaluator = dyn Fn(&[ScalarJet]) -> Result<Vec<ScalarJet>> + Send + Sync;

/// A closed-form chart metric: row-major component jets on a chart box.
#[derive(Clone)]
pub struct MetricSpec {
    pub label: String,
    pub domain: Vec<Interval>,
    eval: Arc<MetricEvaluator>,
}

impl fmt::Debug for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpec")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

impl MetricSpec {
    pub fn new<F>(label: impl Into<String>, domain: Vec<Interval>, f: F) -> Self
    where
        F: Fn(&[ScalarJet]) -> Result<Vec<ScalarJet>> + Send + Sync + 'static,
    {
        MetricSpec {
            label: label.into(),
            domain,
            eval: Arc::new(f),
        }
    }

    /// Diagonal metric from its diagonal component jets.
    pub fn diagonal<F>(label: impl Into<String>, domain: Vec<Interval>, f: F) -> Self
    where
        F: Fn(&[ScalarJet]) -> Result<Vec<ScalarJet>> + Send + Sync + 'static,
    {
        let n = domain.len();
        MetricSpec::new(label, domain, move |x| {
            let diag = f(x)?;
            let zero = x[0].constant_like(0.0);
            let mut out = vec![zero; n * n];
            for (i, d) in diag.into_iter().enumerate() {
                out[i * n + i] = d;
            }
            Ok(out)
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    /// Row-major component jets for arbitrary input jets, no domain check.
    pub fn components(&self, vars: &[ScalarJet]) -> Result<Vec<ScalarJet>> {
        (self.eval)(vars).map_err(|e| e.within(&self.label))
    }

    pub fn metric_at(&self, point: &ChartPoint) -> Result<MetricData> {
        let n = self.dim();
        if point.dim() != n {
            return Err(GeomError::DimensionMismatch(format!(
                "{}: point has {} coordinates, metric expects {n}",
                self.label,
                point.dim()
            )));
        }
        for (i, (x, iv)) in point.coords.iter().zip(&self.domain).enumerate() {
            if !iv.contains(*x) {
                return Err(GeomError::domain(
                    &self.label,
                    format!("coordinate {i} = {x} outside ({}, {})", iv.lo, iv.hi),
                ));
            }
        }
        let vars = ScalarJet::variables(&point.coords);
        let entries = (self.eval)(&vars).map_err(|e| e.within(&self.label))?;
        let m = MetricData::from_component_jets(n, &entries)?;
        m.validate(Tolerances::default().positive_definite)?;
        Ok(m)
    }
}

/// Christoffel symbols of the second kind and their first partials.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelData {
    /// `gamma[[k, i, j]] = Γ^k_{ij}`
    pub gamma: Array3<f64>,
    /// `dgamma[[m, k, i, j]] = ∂_m Γ^k_{ij}`
    pub dgamma: Array4<f64>,
    pub g_inv: Array2<f64>,
    /// `dg_inv[[m, k, l]] = ∂_m g^{kl}`
    pub dg_inv: Array3<f64>,
}

pub fn christoffel(m: &MetricData) -> Result<ChristoffelData> {
    m.validate(Tolerances::default().positive_definite)?;
    let n = m.n;
    let gi = m.inverse()?;
    let mut dgi = Array3::zeros((n, n, n));
    for s in 0..n {
        for k in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        acc += gi[[k, a]] * m.dg[[s, a, b]] * gi[[b, l]];
                    }
                }
                dgi[[s, k, l]] = -acc;
            }
        }
    }
    // First-kind symbols [ij, l] and their partials.
    let mut first = Array3::zeros((n, n, n));
    let mut dfirst = Array4::zeros((n, n, n, n));
    for i in 0..n {
        for j in i..n {
            for l in 0..n {
                let v = 0.5 * (m.dg[[i, j, l]] + m.dg[[j, i, l]] - m.dg[[l, i, j]]);
                first[[i, j, l]] = v;
                first[[j, i, l]] = v;
                for s in 0..n {
                    let dv = 0.5 * (m.d2g[[s, i, j, l]] + m.d2g[[s, j, i, l]] - m.d2g[[s, l, i, j]]);
                    dfirst[[s, i, j, l]] = dv;
                    dfirst[[s, j, i, l]] = dv;
                }
            }
        }
    }
    let mut gamma = Array3::zeros((n, n, n));
    let mut dgamma = Array4::zeros((n, n, n, n));
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut v = 0.0;
                for l in 0..n {
                    v += gi[[k, l]] * first[[i, j, l]];
                }
                gamma[[k, i, j]] = v;
                gamma[[k, j, i]] = v;
                for s in 0..n {
                    let mut dv = 0.0;
                    for l in 0..n {
                        dv += dgi[[s, k, l]] * first[[i, j, l]] + gi[[k, l]] * dfirst[[s, i, j, l]];
                    }
                    dgamma[[s, k, i, j]] = dv;
                    dgamma[[s, k, j, i]] = dv;
                }
            }
        }
    }
    Ok(ChristoffelData {
        gamma,
        dgamma,
        g_inv: gi,
        dg_inv: dgi,
    })
}

/// Riemann, Ricci and scalar curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    /// `riemann[[l, i, j, k]] = R^l_{ijk}`
    pub riemann: Array4<f64>,
    /// `riemann_lowered[[i, j, k, l]] = R_{ijkl}`
    pub riemann_lowered: Array4<f64>,
    pub ricci: Array2<f64>,
    pub scalar: f64,
}

pub fn curvature(m: &MetricData, c: &ChristoffelData) -> Result<CurvatureData> {
    let n = m.n;
    if c.gamma.dim() != (n, n, n) {
        return Err(GeomError::DimensionMismatch("christoffel data does not match metric".into()));
    }
    let gm = &c.gamma;
    let dgm = &c.dgamma;
    let mut riemann = Array4::zeros((n, n, n, n));
    for l in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let mut v = dgm[[i, l, j, k]] - dgm[[j, l, i, k]];
                    for s in 0..n {
                        v += gm[[l, i, s]] * gm[[s, j, k]] - gm[[l, j, s]] * gm[[s, i, k]];
                    }
                    riemann[[l, i, j, k]] = v;
                    riemann[[l, j, i, k]] = -v;
                }
            }
        }
    }
    let mut lowered = Array4::zeros((n, n, n, n));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for s in 0..n {
                        v += m.g[[l, s]] * riemann[[s, i, j, k]];
                    }
                    lowered[[i, j, k, l]] = v;
                }
            }
        }
    }
    let mut ricci = Array2::zeros((n, n));
    for j in 0..n {
        for k in 0..n {
            let mut v = 0.0;
            for i in 0..n {
                v += riemann[[i, i, j, k]];
            }
            ricci[[j, k]] = v;
        }
    }
    let mut scalar = 0.0;
    for j in 0..n {
        for k in 0..n {
            scalar += c.g_inv[[j, k]] * ricci[[j, k]];
        }
    }
    Ok(CurvatureData {
        riemann,
        riemann_lowered: lowered,
        ricci,
        scalar,
    })
}

/// Sectional curvature of the plane spanned by `∂_x` and `∂_y`.
pub fn sectional(m: &MetricData, cur: &CurvatureData, x: usize, y: usize) -> Result<f64> {
    let area = m.g[[x, x]] * m.g[[y, y]] - m.g[[x, y]] * m.g[[x, y]];
    if x == y || !(area >= Tolerances::default().plane) {
        return Err(GeomError::DegeneratePlane { x, y, area });
    }
    Ok(cur.riemann_lowered[[x, y, y, x]] / area)
}

/// A tangent vector field given by chart components and their partials.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    pub comps: Vec<f64>,
    /// `partials[[i, k]] = ∂_i V^k`
    pub partials: Array2<f64>,
}

impl TangentField {
    pub fn zero(n: usize) -> Self {
        TangentField {
            comps: vec![0.0; n],
            partials: Array2::zeros((n, n)),
        }
    }
}

/// `(L_V g)_{ij} = g_{kj} ∂_i V^k + g_{ik} ∂_j V^k + V^k ∂_k g_{ij}`.
pub fn lie_derivative_metric(m: &MetricData, v: &TangentField) -> Result<Array2<f64>> {
    let n = m.n;
    if v.comps.len() != n || v.partials.dim() != (n, n) {
        return Err(GeomError::DimensionMismatch("tangent field does not match metric".into()));
    }
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in 0..n {
                s += m.g[[k, j]] * v.partials[[i, k]]
                    + m.g[[i, k]] * v.partials[[j, k]]
                    + v.comps[k] * m.dg[[k, i, j]];
            }
            out[[i, j]] = s;
            out[[j, i]] = s;
        }
    }
    Ok(out)
}

/// Value, coordinate gradient and coordinate Hessian of a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFieldJet {
    pub value: f64,
    pub grad_coords: Vec<f64>,
    pub hess_coords: Array2<f64>,
}

impl From<&ScalarJet> for ScalarFieldJet {
    fn from(j: &ScalarJet) -> Self {
        let n = j.nvars();
        ScalarFieldJet {
            value: j.value(),
            grad_coords: j.gradient().to_vec(),
            hess_coords: Array2::from_shape_fn((n, n), |(a, b)| j.d2(a, b)),
        }
    }
}

/// Riemannian gradient `g^{ij} ∂_j f` and Hessian `∂_i∂_j f − Γ^k_{ij} ∂_k f`.
pub fn scalar_calculus(
    m: &MetricData,
    c: &ChristoffelData,
    f: &ScalarFieldJet,
) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = m.n;
    if f.grad_coords.len() != n {
        return Err(GeomError::DimensionMismatch("scalar field does not match metric".into()));
    }
    let grad = (0..n)
        .map(|i| (0..n).map(|j| c.g_inv[[i, j]] * f.grad_coords[j]).sum())
        .collect();
    let mut hess = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut v = 0.5 * (f.hess_coords[[i, j]] + f.hess_coords[[j, i]]);
            for k in 0..n {
                v -= c.gamma[[k, i, j]] * f.grad_coords[k];
            }
            hess[[i, j]] = v;
            hess[[j, i]] = v;
        }
    }
    Ok((grad, hess))
}

/// Max |∂_k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il|.
pub fn compatibility_residual(m: &MetricData, c: &ChristoffelData) -> f64 {
    let n = m.n;
    let mut worst = 0.0_f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = m.dg[[k, i, j]];
                for l in 0..n {
                    v -= c.gamma[[l, k, i]] * m.g[[l, j]] + c.gamma[[l, k, j]] * m.g[[i, l]];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// Max |R_{ijkl} + R_{iklj} + R_{iljk}|.
pub fn bianchi_residual(cur: &CurvatureData) -> f64 {
    let r = &cur.riemann_lowered;
    let n = r.dim().0;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = r[[i, j, k, l]] + r[[i, k, l, j]] + r[[i, l, j, k]];
                    worst = worst.max(v.abs());
                }
            }
        }
    }
    worst
}

/// Max deviation from `R_{ijkl} = −R_{jikl} = −R_{ijlk} = R_{klij}`.
pub fn riemann_symmetry_residual(cur: &CurvatureData) -> f64 {
    let r = &cur.riemann_lowered;
    let n = r.dim().0;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let a = r[[i, j, k, l]];
                    worst = worst
                        .max((a + r[[j, i, k, l]]).abs())
                        .max((a + r[[i, j, l, k]]).abs())
                        .max((a - r[[k, l, i, j]]).abs());
                }
            }
        }
    }
    worst
}
