//! Exact forward-mode derivatives up to total order three.
//!
//! [`ScalarJet`] carries the value, gradient, Hessian and third-derivative
//! tensor of a scalar expression in `n` chart variables. Symmetric entries
//! are computed once per canonical index tuple and mirrored, so the
//! permutation symmetry of `d2`/`d3` holds bit-for-bit.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{GeomError, Result};

/// Guard for singular operations (division, sqrt, log, tan poles).
pub const DOMAIN_GUARD: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct ScalarJet {
    n: usize,
    v: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl fmt::Debug for ScalarJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarJet")
            .field("n", &self.n)
            .field("value", &self.v)
            .field("d1", &self.d1)
            .finish_non_exhaustive()
    }
}

#[inline]
fn i2(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

#[inline]
fn i3(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i * n + j) * n + k
}

impl ScalarJet {
    pub fn constant(n: usize, c: f64) -> Self {
        ScalarJet {
            n,
            v: c,
            d1: vec![0.0; n],
            d2: vec![0.0; n * n],
            d3: vec![0.0; n * n * n],
        }
    }

    /// The coordinate function `x_i` evaluated at `x`.
    pub fn variable(n: usize, i: usize, x: f64) -> Self {
        assert!(i < n, "variable index {i} out of range for {n} variables");
        let mut j = ScalarJet::constant(n, x);
        j.d1[i] = 1.0;
        j
    }

    /// One variable jet per coordinate of `coords`.
    pub fn variables(coords: &[f64]) -> Vec<ScalarJet> {
        let n = coords.len();
        coords
            .iter()
            .enumerate()
            .map(|(i, &x)| ScalarJet::variable(n, i, x))
            .collect()
    }

    /// Constant over the same variables as `self`.
    pub fn constant_like(&self, c: f64) -> ScalarJet {
        ScalarJet::constant(self.n, c)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.d1[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.d2[i2(self.n, i, j)]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d3[i3(self.n, i, j, k)]
    }

    pub fn gradient(&self) -> &[f64] {
        &self.d1
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.d1.iter().all(|x| x.is_finite())
            && self.d2.iter().all(|x| x.is_finite())
            && self.d3.iter().all(|x| x.is_finite())
    }

    fn set2(&mut self, i: usize, j: usize, x: f64) {
        let n = self.n;
        self.d2[i2(n, i, j)] = x;
        self.d2[i2(n, j, i)] = x;
    }

    fn set3(&mut self, i: usize, j: usize, k: usize, x: f64) {
        let n = self.n;
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.d3[i3(n, a, b, c)] = x;
        }
    }

    /// `φ ∘ self` given `φ` and its first three derivatives at `self.value()`.
    pub fn compose(&self, phi: [f64; 4]) -> ScalarJet {
        let n = self.n;
        let [f0, f1, f2, f3] = phi;
        let mut r = ScalarJet::constant(n, f0);
        for i in 0..n {
            r.d1[i] = f1 * self.d1[i];
        }
        for i in 0..n {
            for j in i..n {
                let x = f2 * self.d1[i] * self.d1[j] + f1 * self.d2(i, j);
                r.set2(i, j, x);
            }
        }
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let (ui, uj, uk) = (self.d1[i], self.d1[j], self.d1[k]);
                    let x = f3 * ui * uj * uk
                        + f2 * (self.d2(i, j) * uk + self.d2(i, k) * uj + self.d2(j, k) * ui)
                        + f1 * self.d3(i, j, k);
                    r.set3(i, j, k, x);
                }
            }
        }
        r
    }

    fn check_same(&self, other: &ScalarJet) {
        assert_eq!(self.n, other.n, "jets over different variable counts");
    }

    pub fn sin(&self) -> ScalarJet {
        let (s, c) = self.v.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> ScalarJet {
        let (s, c) = self.v.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(&self) -> ScalarJet {
        let e = self.v.exp();
        self.compose([e, e, e, e])
    }

    pub fn square(&self) -> ScalarJet {
        self * self
    }

    pub fn powi(&self, k: i32) -> ScalarJet {
        let x = self.v;
        let kf = k as f64;
        self.compose([
            x.powi(k),
            kf * x.powi(k - 1),
            kf * (kf - 1.0) * x.powi(k - 2),
            kf * (kf - 1.0) * (kf - 2.0) * x.powi(k - 3),
        ])
    }

    pub fn sqrt(&self) -> Result<ScalarJet> {
        let x = self.v;
        if !(x > DOMAIN_GUARD) {
            return Err(GeomError::domain("sqrt", format!("argument {x:e} not above guard")));
        }
        let s = x.sqrt();
        Ok(self.compose([s, 0.5 / s, -0.25 / (x * s), 0.375 / (x * x * s)]))
    }

    pub fn recip(&self) -> Result<ScalarJet> {
        let x = self.v;
        if !(x.abs() > DOMAIN_GUARD) {
            return Err(GeomError::domain("div", format!("denominator {x:e} near zero")));
        }
        let r = 1.0 / x;
        Ok(self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    pub fn div(&self, other: &ScalarJet) -> Result<ScalarJet> {
        Ok(self * &other.recip()?)
    }

    pub fn ln(&self) -> Result<ScalarJet> {
        let x = self.v;
        if !(x > DOMAIN_GUARD) {
            return Err(GeomError::domain("ln", format!("argument {x:e} not above guard")));
        }
        let r = 1.0 / x;
        Ok(self.compose([x.ln(), r, -r * r, 2.0 * r * r * r]))
    }

    pub fn tan(&self) -> Result<ScalarJet> {
        let c = self.v.cos();
        if !(c.abs() > DOMAIN_GUARD) {
            return Err(GeomError::domain("tan", format!("cos = {c:e} at pole")));
        }
        let t = self.v.tan();
        let s = 1.0 + t * t;
        Ok(self.compose([t, s, 2.0 * t * s, s * (2.0 + 6.0 * t * t)]))
    }

    /// Jet of `F` with `∂F/∂x_axis = integrand`, given the value of `F`.
    /// Both `F` and the integrand must depend on `x_axis` alone.
    pub fn antiderivative(value: f64, axis: usize, integrand: &ScalarJet) -> ScalarJet {
        let n = integrand.n;
        let mut r = ScalarJet::constant(n, value);
        if axis >= n {
            return r;
        }
        r.d1[axis] = integrand.v;
        for j in 0..n {
            r.set2(axis, j, integrand.d1[j]);
        }
        for j in 0..n {
            for k in j..n {
                r.set3(axis, j, k, integrand.d2(j, k));
            }
        }
        r
    }
}

impl Add for &ScalarJet {
    type Output = ScalarJet;
    fn add(self, o: &ScalarJet) -> ScalarJet {
        self.check_same(o);
        ScalarJet {
            n: self.n,
            v: self.v + o.v,
            d1: self.d1.iter().zip(&o.d1).map(|(a, b)| a + b).collect(),
            d2: self.d2.iter().zip(&o.d2).map(|(a, b)| a + b).collect(),
            d3: self.d3.iter().zip(&o.d3).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ScalarJet {
    type Output = ScalarJet;
    fn sub(self, o: &ScalarJet) -> ScalarJet {
        self.check_same(o);
        ScalarJet {
            n: self.n,
            v: self.v - o.v,
            d1: self.d1.iter().zip(&o.d1).map(|(a, b)| a - b).collect(),
            d2: self.d2.iter().zip(&o.d2).map(|(a, b)| a - b).collect(),
            d3: self.d3.iter().zip(&o.d3).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ScalarJet {
    type Output = ScalarJet;
    fn neg(self) -> ScalarJet {
        self * -1.0
    }
}

impl Mul for &ScalarJet {
    type Output = ScalarJet;
    fn mul(self, o: &ScalarJet) -> ScalarJet {
        self.check_same(o);
        let n = self.n;
        let (f, g) = (self, o);
        let mut r = ScalarJet::constant(n, f.v * g.v);
        for i in 0..n {
            r.d1[i] = f.d1[i] * g.v + f.v * g.d1[i];
        }
        for i in 0..n {
            for j in i..n {
                let x = f.d2(i, j) * g.v
                    + f.d1[i] * g.d1[j]
                    + f.d1[j] * g.d1[i]
                    + f.v * g.d2(i, j);
                r.set2(i, j, x);
            }
        }
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let x = f.d3(i, j, k) * g.v
                        + f.d2(i, j) * g.d1[k]
                        + f.d2(i, k) * g.d1[j]
                        + f.d2(j, k) * g.d1[i]
                        + f.d1[i] * g.d2(j, k)
                        + f.d1[j] * g.d2(i, k)
                        + f.d1[k] * g.d2(i, j)
                        + f.v * g.d3(i, j, k);
                    r.set3(i, j, k, x);
                }
            }
        }
        r
    }
}

impl Mul<f64> for &ScalarJet {
    type Output = ScalarJet;
    fn mul(self, c: f64) -> ScalarJet {
        ScalarJet {
            n: self.n,
            v: self.v * c,
            d1: self.d1.iter().map(|a| a * c).collect(),
            d2: self.d2.iter().map(|a| a * c).collect(),
            d3: self.d3.iter().map(|a| a * c).collect(),
        }
    }
}

impl Add<f64> for &ScalarJet {
    type Output = ScalarJet;
    fn add(self, c: f64) -> ScalarJet {
        let mut r = self.clone();
        r.v += c;
        r
    }
}

impl Sub<f64> for &ScalarJet {
    type Output = ScalarJet;
    fn sub(self, c: f64) -> ScalarJet {
        self + (-c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ScalarJet {
            type Output = ScalarJet;
            fn $m(self, o: ScalarJet) -> ScalarJet {
                (&self).$m(&o)
            }
        }
        impl $tr<&ScalarJet> for ScalarJet {
            type Output = ScalarJet;
            fn $m(self, o: &ScalarJet) -> ScalarJet {
                (&self).$m(o)
            }
        }
        impl $tr<ScalarJet> for &ScalarJet {
            type Output = ScalarJet;
            fn $m(self, o: ScalarJet) -> ScalarJet {
                self.$m(&o)
            }
        }
        impl $tr<f64> for ScalarJet {
            type Output = ScalarJet;
            fn $m(self, c: f64) -> ScalarJet {
                (&self).$m(c)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ScalarJet {
    type Output = ScalarJet;
    fn neg(self) -> ScalarJet {
        -&self
    }
}

/// A point in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        ChartPoint { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<f64>> for ChartPoint {
    fn from(coords: Vec<f64>) -> Self {
        ChartPoint { coords }
    }
}

impl From<&[f64]> for ChartPoint {
    fn from(coords: &[f64]) -> Self {
        ChartPoint {
            coords: coords.to_vec(),
        }
    }
}

/// Open interval of admissible values for one chart coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Order-3 Taylor data of a vector-valued map at a chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet3 {
    pub dim_in: usize,
    pub dim_out: usize,
    components: Vec<ScalarJet>,
}

impl Jet3 {
    pub fn from_components(dim_in: usize, components: Vec<ScalarJet>) -> Result<Self> {
        if let Some(bad) = components.iter().find(|c| c.nvars() != dim_in) {
            return Err(GeomError::DimensionMismatch(format!(
                "component over {} variables, expected {dim_in}",
                bad.nvars()
            )));
        }
        Ok(Jet3 {
            dim_in,
            dim_out: components.len(),
            components,
        })
    }

    pub fn component(&self, k: usize) -> &ScalarJet {
        &self.components[k]
    }

    pub fn value(&self) -> Vec<f64> {
        self.components.iter().map(ScalarJet::value).collect()
    }

    pub fn d1(&self, k: usize, i: usize) -> f64 {
        self.components[k].d1(i)
    }

    pub fn d2(&self, k: usize, i: usize, j: usize) -> f64 {
        self.components[k].d2(i, j)
    }

    pub fn d3(&self, k: usize, i: usize, j: usize, l: usize) -> f64 {
        self.components[k].d3(i, j, l)
    }

    /// Ambient vector `∂_i L`.
    pub fn partial(&self, i: usize) -> Vec<f64> {
        self.components.iter().map(|c| c.d1(i)).collect()
    }

    /// Ambient vector `∂_i ∂_j L`.
    pub fn partial2(&self, i: usize, j: usize) -> Vec<f64> {
        self.components.iter().map(|c| c.d2(i, j)).collect()
    }

    /// Ambient vector `∂_i ∂_j ∂_k L`.
    pub fn partial3(&self, i: usize, j: usize, k: usize) -> Vec<f64> {
        self.components.iter().map(|c| c.d3(i, j, k)).collect()
    }

    pub fn is_valid(&self) -> bool {
        self.components.iter().all(ScalarJet::is_finite)
    }
}

pub type Evaluator = dyn Fn(&[ScalarJet]) -> Result<Vec<ScalarJet>> + Send + Sync;

/// A map from a chart box into Euclidean space, evaluated on jets.
#[derive(Clone)]
pub struct MapSpec {
    pub dim_in: usize,
    pub dim_out: usize,
    pub domain: Vec<Interval>,
    pub label: String,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSpec")
            .field("label", &self.label)
            .field("dim_in", &self.dim_in)
            .field("dim_out", &self.dim_out)
            .field("domain", &self.domain)
            .finish()
    }
}

impl MapSpec {
    pub fn new<F>(label: impl Into<String>, dim_out: usize, domain: Vec<Interval>, f: F) -> Self
    where
        F: Fn(&[ScalarJet]) -> Result<Vec<ScalarJet>> + Send + Sync + 'static,
    {
        MapSpec {
            dim_in: domain.len(),
            dim_out,
            domain,
            label: label.into(),
            evaluator: Arc::new(f),
        }
    }

    pub fn check_point(&self, point: &ChartPoint) -> Result<()> {
        if point.dim() != self.dim_in {
            return Err(GeomError::DimensionMismatch(format!(
                "{}: point has {} coordinates, map expects {}",
                self.label,
                point.dim(),
                self.dim_in
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
        Ok(())
    }

    /// Plain function value, no domain check.
    pub fn value_at(&self, coords: &[f64]) -> Result<Vec<f64>> {
        let vars: Vec<ScalarJet> = coords.iter().map(|&x| ScalarJet::constant(0, x)).collect();
        let out = (self.evaluator)(&vars).map_err(|e| e.within(&self.label))?;
        Ok(out.iter().map(ScalarJet::value).collect())
    }

    fn eval_jets(&self, coords: &[f64]) -> Result<Vec<ScalarJet>> {
        let vars = ScalarJet::variables(coords);
        (self.evaluator)(&vars).map_err(|e| e.within(&self.label))
    }
}

/// Jet of a scalar closed-form expression at a point.
pub fn lift_scalar<F>(f: F, point: &ChartPoint) -> Result<Jet3>
where
    F: Fn(&[ScalarJet]) -> Result<ScalarJet>,
{
    let vars = ScalarJet::variables(&point.coords);
    let out = f(&vars)?;
    let jet = Jet3::from_components(point.dim(), vec![out])?;
    if !jet.is_valid() {
        return Err(GeomError::domain("scalar", "non-finite jet"));
    }
    Ok(jet)
}

/// Full order-3 jet of a map at a chart point.
pub fn lift_immersion(spec: &MapSpec, point: &ChartPoint) -> Result<Jet3> {
    spec.check_point(point)?;
    let out = spec.eval_jets(&point.coords)?;
    if out.len() != spec.dim_out {
        return Err(GeomError::DimensionMismatch(format!(
            "{}: evaluator returned {} components, expected {}",
            spec.label,
            out.len(),
            spec.dim_out
        )));
    }
    let jet = Jet3::from_components(spec.dim_in, out)?;
    if !jet.is_valid() {
        return Err(GeomError::domain(&spec.label, "non-finite jet"));
    }
    Ok(jet)
}

/// Maximum absolute discrepancy between jet derivatives and central
/// differences of the plain map values, per derivative order.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FdDiscrepancy {
    pub order1: f64,
    pub order2: f64,
    pub order3: f64,
}

/// Compares each jet derivative with the tensor product of central
/// first-difference operators applied to map values. The stencil reaches
/// `3·step` along a single axis.
pub fn fd_crosscheck(spec: &MapSpec, point: &ChartPoint, step: f64) -> Result<FdDiscrepancy> {
    let jet = lift_immersion(spec, point)?;
    let n = spec.dim_in;
    for (i, iv) in spec.domain.iter().enumerate() {
        let x = point.coords[i];
        if !(iv.contains(x - 3.0 * step) && iv.contains(x + 3.0 * step)) {
            return Err(GeomError::domain(
                &spec.label,
                format!("difference stencil leaves the domain along coordinate {i}"),
            ));
        }
    }
    let eval_shift = |shift: &[(usize, f64)]| -> Result<Vec<f64>> {
        let mut c = point.coords.clone();
        for &(i, s) in shift {
            c[i] += s * step;
        }
        spec.value_at(&c)
    };
    let signs = [1.0, -1.0];
    let mut out = FdDiscrepancy {
        order1: 0.0,
        order2: 0.0,
        order3: 0.0,
    };
    for i in 0..n {
        let plus = eval_shift(&[(i, 1.0)])?;
        let minus = eval_shift(&[(i, -1.0)])?;
        for k in 0..spec.dim_out {
            let fd = (plus[k] - minus[k]) / (2.0 * step);
            out.order1 = out.order1.max((fd - jet.d1(k, i)).abs());
        }
    }
    for i in 0..n {
        for j in i..n {
            let mut acc = vec![0.0; spec.dim_out];
            for &si in &signs {
                for &sj in &signs {
                    let v = eval_shift(&[(i, si), (j, sj)])?;
                    for k in 0..spec.dim_out {
                        acc[k] += si * sj * v[k];
                    }
                }
            }
            for k in 0..spec.dim_out {
                let fd = acc[k] / (4.0 * step * step);
                out.order2 = out.order2.max((fd - jet.d2(k, i, j)).abs());
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            for l in j..n {
                let mut acc = vec![0.0; spec.dim_out];
                for &si in &signs {
                    for &sj in &signs {
                        for &sl in &signs {
                            let v = eval_shift(&[(i, si), (j, sj), (l, sl)])?;
                            for k in 0..spec.dim_out {
                                acc[k] += si * sj * sl * v[k];
                            }
                        }
                    }
                }
                for k in 0..spec.dim_out {
                    let fd = acc[k] / (8.0 * step * step * step);
                    out.order3 = out.order3.max((fd - jet.d3(k, i, j, l)).abs());
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn box_domain(n: usize, r: f64) -> Vec<Interval> {
        vec![Interval::new(-r, r); n]
    }

    fn plane() -> MapSpec {
        MapSpec::new("plane", 3, box_domain(2, 10.0), |x| {
            Ok(vec![x[0].clone(), x[1].clone(), x[0].constant_like(0.0)])
        })
    }

    #[test]
    fn square_at_three() {
        let j = lift_scalar(|x| Ok(x[0].square()), &ChartPoint::new(vec![3.0])).unwrap();
        let c = j.component(0);
        assert_eq!((c.value(), c.d1(0), c.d2(0, 0), c.d3(0, 0, 0)), (9.0, 6.0, 2.0, 0.0));
    }

    #[test]
    fn sine_at_zero() {
        let j = lift_scalar(|x| Ok(x[0].sin()), &ChartPoint::new(vec![0.0])).unwrap();
        let c = j.component(0);
        assert_eq!((c.value(), c.d1(0), c.d2(0, 0), c.d3(0, 0, 0)), (0.0, 1.0, 0.0, -1.0));
    }

    #[test]
    fn sqrt_profile_against_central_differences() {
        // Oracle: central differences of the closed form with step 1e-4.
        let f = |x: f64| (1.0 + x * x).sqrt();
        let h = 1e-4;
        let x0 = 1.0;
        let fd1 = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
        let fd2 = (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h);
        let j = lift_scalar(|x| (x[0].square() + 1.0).sqrt(), &ChartPoint::new(vec![x0])).unwrap();
        let c = j.component(0);
        assert!((c.value() - 2f64.sqrt()).abs() < 1e-15);
        assert!((c.d1(0) - fd1).abs() < 1e-6);
        assert!((c.d2(0, 0) - fd2).abs() < 1e-6);
        assert!((c.d1(0) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((c.d2(0, 0) - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn domain_violations_carry_labels() {
        let p = ChartPoint::new(vec![-1.0]);
        let e = lift_scalar(|x| x[0].sqrt(), &p).unwrap_err();
        assert!(matches!(e, GeomError::DomainViolation { ref label, .. } if label == "sqrt"));
        let e = lift_scalar(|x| x[0].tan(), &ChartPoint::new(vec![FRAC_PI_2])).unwrap_err();
        assert!(matches!(e, GeomError::DomainViolation { ref label, .. } if label == "tan"));
        let e = lift_scalar(|x| x[0].constant_like(1.0).div(&(&x[0] * 0.0)), &p).unwrap_err();
        assert!(matches!(e, GeomError::DomainViolation { ref label, .. } if label == "div"));
    }

    #[test]
    fn plane_jet_is_affine() {
        let j = lift_immersion(&plane(), &ChartPoint::new(vec![1.0, 2.0])).unwrap();
        assert_eq!(j.value(), vec![1.0, 2.0, 0.0]);
        assert_eq!(j.partial(0), vec![1.0, 0.0, 0.0]);
        assert_eq!(j.partial(1), vec![0.0, 1.0, 0.0]);
        for i in 0..2 {
            for k in 0..2 {
                assert!(j.partial2(i, k).iter().all(|&x| x == 0.0));
                for l in 0..2 {
                    assert!(j.partial3(i, k, l).iter().all(|&x| x == 0.0));
                }
            }
        }
    }

    #[test]
    fn cylinder_jet() {
        let cyl = MapSpec::new(
            "cylinder",
            3,
            vec![Interval::new(-PI, PI), Interval::new(-10.0, 10.0)],
            |x| Ok(vec![&x[0].cos() * 2.0, &x[0].sin() * 2.0, x[1].clone()]),
        );
        let j = lift_immersion(&cyl, &ChartPoint::new(vec![FRAC_PI_2, 5.0])).unwrap();
        let v = j.value();
        assert!(v[0].abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15 && v[2] == 5.0);
        let d0 = j.partial(0);
        assert!((d0[0] + 2.0).abs() < 1e-15 && d0[1].abs() < 1e-15 && d0[2] == 0.0);
        assert_eq!(j.partial(1), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_points_outside_domain() {
        let e = lift_immersion(&plane(), &ChartPoint::new(vec![11.0, 0.0])).unwrap_err();
        assert!(matches!(e, GeomError::DomainViolation { .. }));
        let e = lift_immersion(&plane(), &ChartPoint::new(vec![0.0])).unwrap_err();
        assert!(matches!(e, GeomError::DimensionMismatch(_)));
    }

    #[test]
    fn fd_crosscheck_plane_and_sine() {
        let d = fd_crosscheck(&plane(), &ChartPoint::new(vec![0.3, -0.4]), 1e-3).unwrap();
        assert!(d.order1 < 1e-12 && d.order2 < 1e-6 && d.order3 < 1e-3);
        let sine = MapSpec::new("sin", 1, box_domain(1, 3.0), |x| Ok(vec![x[0].sin()]));
        let d = fd_crosscheck(&sine, &ChartPoint::new(vec![0.7]), 1e-3).unwrap();
        assert!(d.order1 <= 1e-6, "{d:?}");
    }

    #[test]
    fn fd_crosscheck_sphere_equator() {
        let sphere = MapSpec::new(
            "sphere",
            3,
            vec![Interval::new(-1.5, 1.5), Interval::new(-PI, PI)],
            |x| {
                let c = x[0].cos();
                Ok(vec![x[0].sin(), &c * &x[1].sin(), &c * &x[1].cos()])
            },
        );
        let d = fd_crosscheck(&sphere, &ChartPoint::new(vec![0.0, 0.4]), 1e-3).unwrap();
        assert!(d.order1 <= 1e-6 && d.order2 <= 1e-4, "{d:?}");
    }

    #[test]
    fn fd_stencil_must_stay_inside() {
        let e = fd_crosscheck(&plane(), &ChartPoint::new(vec![9.999, 0.0]), 1e-3).unwrap_err();
        assert!(matches!(e, GeomError::DomainViolation { .. }));
    }

    #[test]
    fn antiderivative_matches_closed_form() {
        // F(s) = sin s has integrand cos s.
        let s = 0.3;
        let vars = ScalarJet::variables(&[s, 1.0]);
        let anti = ScalarJet::antiderivative(s.sin(), 0, &vars[0].cos());
        let direct = vars[0].sin();
        assert!((anti.clone() - direct).is_finite());
        for i in 0..2 {
            assert!((anti.d1(i) - vars[0].sin().d1(i)).abs() < 1e-15);
            for j in 0..2 {
                assert!((anti.d2(i, j) - vars[0].sin().d2(i, j)).abs() < 1e-15);
                for k in 0..2 {
                    assert!((anti.d3(i, j, k) - vars[0].sin().d3(i, j, k)).abs() < 1e-15);
                }
            }
        }
    }
}
