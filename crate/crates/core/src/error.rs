use thiserror::Error;

/// Errors produced by the chain-stability library.
///
/// Numeric payloads are widened to `f64` so the error type is independent of
/// the scalar the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EamError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("{function} evaluated outside its domain at {value}")]
    DomainViolation { function: &'static str, value: f64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("difference order {0} is outside 1..=4")]
    OrderOutOfRange(usize),

    #[error("Fourier mode k={k} is outside 1..={n}")]
    ModeOutOfRange { k: usize, n: usize },

    #[error("Fourier symbol s={0} is outside [0, 4]")]
    SymbolOutOfRange(f64),

    #[error("displacement is not mean-zero (mean {mean}, tolerance {tolerance})")]
    NotMeanZero { mean: f64, tolerance: f64 },

    #[error("matrix is not symmetric (max asymmetry {0})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite on the requested subspace")]
    NotPositiveDefinite,

    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {off_norm})")]
    JacobiNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("Newton iteration did not converge in {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("projected Hessian is singular or indefinite at iteration {iteration}")]
    SingularHessian { iteration: usize },

    #[error("no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("strain grid must be strictly increasing")]
    GridNotIncreasing,

    #[error("parse error: {0}")]
    Parse(String),
}

impl EamError {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        EamError::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }
}

pub type Result<T, E = EamError> = std::result::Result<T, E>;
