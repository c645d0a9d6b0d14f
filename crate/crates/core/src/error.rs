use thiserror::Error;

/// Errors raised by the library. Numerical payloads are reported as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("degenerate spectrum: gap {gap:e} between levels {index} and {} is below tolerance", index + 1)]
    DegenerateSpectrum { index: usize, gap: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("gap closes near q = {q}: |g| = {gap:e}")]
    GapClosure { q: f64, gap: f64 },

    #[error("schedule values are not strictly increasing at index {index}")]
    NotMonotone { index: usize },

    #[error("schedule must start at q = 0 and end at q = 1")]
    BadEndpoints,

    #[error("dephasing matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dephasing rate must be positive, got {value}")]
    NonPositiveRate { value: f64 },

    #[error("integrator did not reach rtol within {max_steps} steps (last change {change:e})")]
    StepLimitExceeded { max_steps: usize, change: f64 },

    #[error("invalid state at s = {s}: {reason}")]
    InvalidState { s: f64, reason: String },

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    QuadratureNotConverged { estimate: f64, error: f64 },

    #[error("no equatorial crossing found on the interval starting at s = {s}")]
    NoIntersection { s: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
