use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigendecomposition failed to converge for a {dim}x{dim} block")]
    NoConvergence { dim: usize },

    #[error("invalid time grid: {0}")]
    InvalidTimes(String),

    #[error("invalid fragment: {0}")]
    InvalidFragment(String),

    /// The fragment carries (numerically) no amplitude, so it cannot be renormalized.
    #[error("degenerate fragment {levels:?}: weight {weight:e} below threshold")]
    DegenerateFragment { levels: Vec<usize>, weight: f64 },

    #[error("density matrix eigenvalue {eigenvalue:e} violates positivity")]
    PositivityViolation { eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("C({n_levels}, {n_fragment}) subsets exceed the enumeration cap of {cap}")]
    EnumerationCapExceeded {
        n_levels: usize,
        n_fragment: usize,
        cap: u128,
    },

    #[error("insufficient data for fit: {0}")]
    InsufficientData(String),
}
