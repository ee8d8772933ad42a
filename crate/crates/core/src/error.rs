use thiserror::Error;

use crate::words::Word;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("non-finite entry in matrix input")]
    NonFinite,

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.6e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("no value stored for {word} (needed by pair {left} , {right})")]
    MissingValue { word: Word, left: Word, right: Word },

    #[error("contraction norm {norm:.6e} exceeds 1")]
    NotContraction { norm: f64 },

    #[error("partial matrix is not partially positive: submatrix without index {dropped} has min eigenvalue {min_eigenvalue:.6e}")]
    PartialPositivity { dropped: usize, min_eigenvalue: f64 },

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("matrix is not Toeplitz: entry ({s1}, {t1}) disagrees with ({s2}, {t2})")]
    NotToeplitz { s1: Word, t1: Word, s2: Word, t2: Word },

    #[error("ball of radius {radius} has {size} words, above the cap of {cap}")]
    SizeCap { radius: usize, size: usize, cap: usize },

    #[error("value at e is singular; cannot normalize")]
    SingularNormalization,

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("replay mismatch at class {0}")]
    ReplayMismatch(Word),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed input rather than failed mathematics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Json(_)
                | Error::Io(_)
                | Error::Invalid(_)
                | Error::NonFinite
                | Error::NotHermitian { .. }
                | Error::Dimension(_)
                | Error::MissingValue { .. }
                | Error::DomainTooSmall(_)
                | Error::SizeCap { .. }
                | Error::ContextMismatch(_)
        )
    }

    /// Stable short name, used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NonFinite => "non_finite",
            Error::NoConvergence { .. } => "no_convergence",
            Error::NotPsd { .. } => "not_psd",
            Error::Dimension(_) => "dimension",
            Error::MissingValue { .. } => "missing_value",
            Error::NotContraction { .. } => "not_contraction",
            Error::PartialPositivity { .. } => "partial_positivity",
            Error::DomainTooSmall(_) => "domain_too_small",
            Error::NotToeplitz { .. } => "not_toeplitz",
            Error::SizeCap { .. } => "size_cap",
            Error::SingularNormalization => "singular_normalization",
            Error::ContextMismatch(_) => "context_mismatch",
            Error::Invalid(_) => "invalid",
            Error::ReplayMismatch(_) => "replay_mismatch",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
