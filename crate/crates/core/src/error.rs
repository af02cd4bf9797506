use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid qudit dimension {0}; must be at least 2")]
    InvalidDimension(usize),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("length mismatch: {what} has length {found}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("code-subspace complement has dimension {available}; need at least {required}")]
    ComplementTooSmall { available: usize, required: usize },

    #[error("enumeration of {size} assignments exceeds cap {cap}")]
    EnumerationTooLarge { size: u64, cap: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
