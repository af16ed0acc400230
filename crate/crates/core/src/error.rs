use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("interval count must be even, got {0}")]
    OddIntervalCount(usize),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("the Il'in scheme requires a uniform mesh")]
    IlinOnNonUniformMesh,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero pivot at row {index}")]
    ZeroPivot { index: usize },

    #[error("iteration did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("degenerate triangle {index} (signed area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("meshes are not nested: {0}")]
    NonNestedMeshes(String),

    #[error("problem has no exact solution; use the two-mesh estimator instead")]
    MissingExactSolution,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical pipeline itself (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroPivot { .. } | Error::NotConverged { .. } | Error::DegenerateTriangle { .. }
        )
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
