use thiserror::Error;

/// Errors raised by the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("domain violation in `{label}`: {detail}")]
    DomainViolation { label: String, detail: String },

    #[error("metric is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    SingularMetric { min_eigenvalue: f64 },

    #[error("immersion is rank deficient (smallest singular value {min_singular:e})")]
    RankDeficient { min_singular: f64 },

    #[error("coordinate plane ({x}, {y}) is degenerate (area form {area:e})")]
    DegeneratePlane { x: usize, y: usize, area: f64 },

    #[error("soliton fit needs a non-empty sample grid, got {0} points")]
    EmptyGrid(usize),

    #[error("bad parameter `{name}`: {detail}")]
    BadParameter { name: String, detail: String },

    #[error("scaling function `{label}` is not positive ({value:e})")]
    NonPositiveScaling { label: String, value: f64 },

    #[error("classification inconclusive: {0}")]
    InconclusiveClassification(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl GeomError {
    pub fn domain(label: impl Into<String>, detail: impl Into<String>) -> Self {
        GeomError::DomainViolation {
            label: label.into(),
            detail: detail.into(),
        }
    }

    pub fn bad_param(name: impl Into<String>, detail: impl Into<String>) -> Self {
        GeomError::BadParameter {
            name: name.into(),
            detail: detail.into(),
        }
    }

    /// Prefix the label of a domain violation with the enclosing expression name.
    pub fn within(self, outer: &str) -> Self {
        match self {
            GeomError::DomainViolation { label, detail } => GeomError::DomainViolation {
                label: format!("{outer}/{label}"),
                detail,
            },
            other => other,
        }
    }

    /// True for failures that stem from the numerics rather than from user input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, GeomError::BadParameter { .. })
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
