use thiserror::Error;

use crate::jets::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("point {0:?} lies outside the chart domain")]
    OutsideDomain(Vec<f64>),
    #[error("metric is singular at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("metric is not positive-definite at {0:?}")]
    NotPositiveDefinite(Vec<f64>),
    #[error("expected chart dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("form degree {degree} too large for chart dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("form degrees incompatible: {0}")]
    DegreeMismatch(String),
    #[error("hodge star requires an oriented metric")]
    Unoriented,
    #[error("Jacobian is rank-deficient at {0:?}")]
    RankDeficient(Vec<f64>),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{check} violated: residual {residual:.3e} exceeds {tolerance:.1e}")]
    StructureViolation { check: String, residual: f64, tolerance: f64 },
    #[error("dimension {0} unsupported: dimension >= 6 required")]
    DimensionUnsupported(usize),
    #[error("fixture `{fixture}` has no {what}")]
    MissingStructure { fixture: String, what: &'static str },
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
