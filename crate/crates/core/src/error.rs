use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Invalid construction parameters (grid sizes, radii, lists).
    #[error("configuration error: {0}")]
    Config(String),

    /// Two objects that must share a grid (or a Fock space) do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A quantity was requested outside the domain where it is finite.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver did not converge for index {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    /// Quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    /// A validity gate (box margin, edge amplitude, truncation) failed.
    #[error("validity gate failed: {0}")]
    Gate(String),

    #[error("Fock space dimension {dimension} exceeds the cap {cap}")]
    DimensionOverflow { dimension: usize, cap: usize },

    /// Discarded Gibbs weight of a truncated Fock space is too large.
    #[error("truncation weight {weight:e} exceeds {limit:e}; raise the occupation cap")]
    Truncation { weight: f64, limit: f64 },

    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn gate(msg: impl Into<String>) -> Self {
        Error::Gate(msg.into())
    }
}
