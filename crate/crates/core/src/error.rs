use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: |M - M^H| = {deviation:.3e} at ({row}, {col})")]
    NotHermitian { row: usize, col: usize, deviation: f64 },
    #[error("operator is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },
    #[error("trace {trace} differs from 1")]
    TraceMismatch { trace: f64 },
    #[error("operator is not positive definite: min eigenvalue {min_eig:.3e}")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("Hermitian eigensolver failed to converge (dim {dim})")]
    EigSolverFailure { dim: usize },
    #[error("integrand is not finite at {at}")]
    NonFiniteIntegrand { at: f64 },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("tolerance not met: achieved {achieved:.3e}, requested {requested:.3e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("f-divergence method needs f'' but {0} has none")]
    MissingSecondDerivative(String),
    #[error("quasi divergence is not positive ({0})")]
    NonPositiveQ(f64),
    #[error("invalid Renyi order {0}: need alpha > 0 and alpha != 1")]
    InvalidOrder(f64),
    #[error("alpha=1 requires method renyi_limit")]
    Alpha1RequiresLimit,
    #[error("curve decreases by {drop:.3e} near gamma = {at}")]
    NotMonotone { at: f64, drop: f64 },
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("tensor dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("bad threshold c = {0}")]
    BadThreshold(f64),
    #[error("denominator f(c) = {0} is not positive")]
    NonPositiveDenominator(f64),
    #[error("witness leaves the conjugate domain at gamma = {at}")]
    DomainViolation { at: f64 },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::EigSolverFailure { .. }
            | Error::NonFiniteIntegrand { .. }
            | Error::QuadratureFailure(_)
            | Error::ToleranceNotMet { .. }
            | Error::NonPositiveQ(_)
            | Error::NotMonotone { .. } => ErrorClass::Numerical,
            _ => ErrorClass::Validation,
        }
    }

    /// Stable machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "NonSquare",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPsd { .. } => "NotPSD",
            Error::TraceMismatch { .. } => "TraceMismatch",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::EigSolverFailure { .. } => "EigSolverFailure",
            Error::NonFiniteIntegrand { .. } => "NonFiniteIntegrand",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::SupportViolation(_) => "SupportViolation",
            Error::MissingSecondDerivative(_) => "MissingSecondDerivative",
            Error::NonPositiveQ(_) => "NonPositiveQ",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::Alpha1RequiresLimit => "InvalidOrder",
            Error::NotMonotone { .. } => "NotMonotone",
            Error::BadDimensions(_) => "BadDimensions",
            Error::DimensionCapExceeded { .. } => "DimensionCapExceeded",
            Error::BadThreshold(_) => "BadThreshold",
            Error::NonPositiveDenominator(_) => "NonPositiveDenominator",
            Error::DomainViolation { .. } => "DomainViolation",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "IoError",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
