use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max entry mismatch {0:.3e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("eigensolver did not converge (off-diagonal residual {0:.3e})")]
    NoConvergence(f64),

    #[error("matrix logarithm needs strictly positive spectrum (smallest eigenvalue {0:.3e})")]
    LogDomain(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid resource set: {0}")]
    InvalidResource(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("channel is not primitive (fixed-point space has dimension {0})")]
    NotPrimitive(usize),

    #[error("state is rank deficient (smallest eigenvalue {0:.3e})")]
    RankDeficient(f64),

    #[error("dual seminorm is unbounded: functional does not vanish on the commutant (overlap {0:.3e})")]
    Unbounded(f64),

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
