//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The fractional order lies outside (0,1) ∪ (1,2].
    #[error("invalid fractional order {gamma}: {reason}")]
    InvalidOrder { gamma: f64, reason: &'static str },

    /// A scalar or size argument violates an operation's preconditions.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Matrix/field dimensions do not match.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Tridiagonal Toeplitz matrix without the analytic eigenstructure (a = 0 or c = 0).
    #[error("degenerate tridiagonal matrix: {0}")]
    DegenerateMatrix(String),

    /// c/a < 0: the analytic spectrum is complex and unsupported here.
    #[error("complex spectrum: c/a = {ratio} < 0")]
    ComplexSpectrum { ratio: f64 },

    /// Inconsistent problem definition (orders, coefficients, or domain).
    #[error("invalid problem specification: {0}")]
    ProblemSpec(String),

    /// A point lies outside the domain of a closed-form expression.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Linear system factorization failed.
    #[error("singular system: {0}")]
    Singular(String),

    /// NaN or Inf appeared in the solution field.
    #[error("divergence detected at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },

    /// Run configuration is inconsistent (e.g. t_end/dt not an integer).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A dense test oracle was asked for more unknowns than it supports.
    #[error("oracle capacity exceeded: {unknowns} unknowns > cap {cap}")]
    OracleCapacity { unknowns: usize, cap: usize },

    /// Convergence rates cannot be formed from non-positive errors.
    #[error("degenerate rate: {0}")]
    DegenerateRate(String),

    /// Unknown catalog problem name.
    #[error("unknown problem {0:?}")]
    UnknownProblem(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),
}
