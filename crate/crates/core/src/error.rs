use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical kernels, the Arnoldi driver and the bounds.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry encountered in {context}")]
    NonFiniteEntry { context: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is singular: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("projected Hessenberg matrix is numerically singular")]
    SingularProjectedMatrix,

    #[error("shift {shift} makes the shifted system singular")]
    SingularShift { shift: Complex64 },

    #[error("{algorithm} did not converge within {iterations} iterations")]
    NoConvergence { algorithm: &'static str, iterations: usize },

    #[error("eigenvalue {eigenvalue} lies on the closed negative real axis")]
    SpectrumOnBranchCut { eigenvalue: Complex64 },

    #[error("dimension {n} exceeds the dense limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("posterior integral diverges for k = {k} (needs k >= 2)")]
    DivergentIntegral { k: usize },

    #[error("spectrum not valid for the bound: {0}")]
    InvalidSpectrum(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("quadrature tolerance not met: estimate {estimate:e}, error {abs_error:e}")]
    ToleranceNotMet { estimate: f64, abs_error: f64 },

    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("stopping rule not met within k_max = {k_max} steps")]
    BudgetExhausted { k_max: usize },

    #[error("perturbed matrix lost positive definiteness after {halvings} halvings")]
    PositivityLost { halvings: usize },

    #[error("unsupported context: {0}")]
    UnsupportedContext(String),

    #[error("matrix market parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
