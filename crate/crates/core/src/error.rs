use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Values are reported as `f64` regardless of the working scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max asymmetry {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },
    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },
    #[error("matrix is not positive definite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix is singular or ill-conditioned: reciprocal condition {rcond:e}")]
    Singular { rcond: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("isometry defect {defect:e} exceeds {limit:e}")]
    IsometryDefect { defect: f64, limit: f64 },
    #[error("not a contraction: norm {norm}")]
    NotContraction { norm: f64 },
    #[error("spectral parameter {mu} is within {distance:e} of spec(TT*) (gap {gap:e})")]
    NearSpectrum { mu: f64, distance: f64, gap: f64 },
    #[error("bound violated in {context}: value {value} exceeds bound {bound}")]
    BoundViolation {
        context: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("internal consistency failure in {module}: {detail}")]
    Internal { module: &'static str, detail: String },
}

impl Error {
    /// True for errors that indicate a bug rather than a rejected input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal { .. })
    }

    /// Short stable identifier used in experiment reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not-hermitian",
            Error::NoConvergence { .. } => "no-convergence",
            Error::NotPsd { .. } => "not-psd",
            Error::NotPositiveDefinite { .. } => "not-positive-definite",
            Error::Singular { .. } => "singular",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::Dimension(_) => "dimension",
            Error::Domain { .. } => "domain",
            Error::IsometryDefect { .. } => "isometry-defect",
            Error::NotContraction { .. } => "not-contraction",
            Error::NearSpectrum { .. } => "near-spectrum",
            Error::BoundViolation { .. } => "bound-violation",
            Error::Internal { .. } => "internal",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
