use thiserror::Error;

/// Errors produced by the numerical kernel, the channel constructors and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("value out of range: {0}")]
    Range(String),
    #[error("not a probability vector: {0}")]
    SimplexViolation(String),
    #[error("invalid density operator: {0}")]
    InvalidState(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimTooLarge { dim: usize, max: usize },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn range_check(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Range(format!("{name} = {value} not in [{lo}, {hi}]")))
    }
}
