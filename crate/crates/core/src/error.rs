use thiserror::Error;

/// Failures while reading the text or JSON forms of values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed rational `{0}`")]
    Rational(String),
    #[error("malformed variable `{0}`")]
    Variable(String),
    #[error("malformed polynomial: {0}")]
    Polynomial(String),
    #[error("malformed covariance: {0}")]
    Covariance(String),
    #[error("malformed multi-index: {0}")]
    MultiIndex(String),
    #[error("malformed recurrence: {0}")]
    Recurrence(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("dimension mismatch: covariance has k={expected}, multi-index has {got} entries")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable {0} has no assigned value")]
    MissingVariable(String),
    #[error("brute-force enumeration limited to total order {limit}, got {total}")]
    SizeGuard { limit: u32, total: u32 },
    #[error("no recurrence found up to order {max_order}, degree {max_degree} (largest tried: order {tried_order}, degree {tried_degree}){}", reason.as_ref().map(|r| format!(": {r}")).unwrap_or_default())]
    NotFound {
        max_order: usize,
        max_degree: usize,
        tried_order: usize,
        tried_degree: usize,
        reason: Option<String>,
    },
    #[error("leading coefficient vanishes at n={0}")]
    SingularLeadingCoefficient(i64),
    #[error("recurrence does not produce an exact value at n={0}")]
    InexactStep(i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
