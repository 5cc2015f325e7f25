use serde::Serialize;

/// Every numerical threshold used by the pipeline, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Guard for division, sqrt, log and tan poles inside jet arithmetic.
    pub domain: f64,
    /// Smallest admissible metric eigenvalue.
    pub positive_definite: f64,
    /// Smallest admissible singular value of an immersion Jacobian.
    pub rank: f64,
    /// Smallest admissible area form of a coordinate plane.
    pub plane: f64,
    /// Soliton verdict: residual below this is a soliton.
    pub accept: f64,
    /// Soliton verdict: residual above this is not a soliton.
    pub reject: f64,
    /// |lambda| at or below this counts as steady.
    pub steady: f64,
    /// Principal curvatures closer than this form one cluster.
    pub cluster: f64,
    /// Match tolerance for the two-root principal curvature formula.
    pub principal_formula: f64,
    /// Closed-form fixture comparisons.
    pub fixture: f64,
    /// Concurrent-field identity.
    pub identity: f64,
    /// Extrinsic versus intrinsic Ricci.
    pub gauss: f64,
    pub codazzi: f64,
    pub bianchi: f64,
    /// Order-one jet versus central differences at step 1e-3.
    pub finite_difference: f64,
    /// Foliation residual below this is "zero".
    pub foliation_zero: f64,
    /// Foliation residual above this is "nonzero"; in between is inconclusive.
    pub foliation_nonzero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            domain: 1e-9,
            positive_definite: 1e-10,
            rank: 1e-8,
            plane: 1e-12,
            accept: 1e-6,
            reject: 1e-2,
            steady: 1e-9,
            cluster: 1e-6,
            principal_formula: 1e-6,
            fixture: 1e-8,
            identity: 1e-7,
            gauss: 1e-6,
            codazzi: 1e-7,
            bianchi: 1e-8,
            finite_difference: 1e-6,
            foliation_zero: 1e-8,
            foliation_nonzero: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn is_consistent(&self) -> bool {
        self.accept < self.reject && self.foliation_zero < self.foliation_nonzero
    }
}
