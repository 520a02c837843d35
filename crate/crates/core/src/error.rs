//! Error type shared by all solver modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation
    /// (negative strain invariant, negative load, level below the rest state).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid input: bad grid shape, too few quadrature nodes,
    /// inconsistent profile lengths.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Loss of ellipticity: a coefficient that must stay positive crossed zero.
    #[error("ellipticity violation: {0}")]
    Ellipticity(String),

    /// A bracketing or growth search ran away without meeting its target.
    #[error("divergence: {0}")]
    Divergence(String),

    /// A fixed-step integration failed its accuracy postcondition; rerun with
    /// more steps.
    #[error("step count too low: {0}")]
    StepCount(String),

    /// An iterative solve stalled before reaching tolerance.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// The discrete answer is structurally wrong for the continuum problem
    /// (sign-changing principal eigenvector, singular factorization).
    #[error("discretization failure: {0}")]
    Discretization(String),
}
