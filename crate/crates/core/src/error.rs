//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by construction, solvers, and classifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "reservoir constraint |M| <= sqrt(n(n+1)) violated: |M| = {m_abs:.6e}, bound = {bound:.6e}"
    )]
    ReservoirConstraint { m_abs: f64, bound: f64 },

    #[error(
        "truncation budget exceeded at dimension {dim}: trace loss {loss:.3e} > budget {budget:.3e}"
    )]
    TruncationBudget { dim: usize, loss: f64, budget: f64 },

    #[error("empty cavity: mean photon number {0:.3e} is below the division guard")]
    EmptyCavity(f64),

    #[error("correlation order {order} exceeds truncation support (d/2 = {half_dim})")]
    OrderExceedsTruncation { order: usize, half_dim: usize },

    #[error("degenerate Liouvillian null space: {0}")]
    DegenerateSteadyState(String),

    #[error("steady-state solve did not converge: residual {0:.3e}")]
    NonConvergence(f64),

    #[error("propagation step failed: {0}")]
    PropagationFailure(String),

    #[error("root bracketing for {what} failed on scanned interval [{lo:.6e}, {hi:.6e}]")]
    RootBracketing { what: String, lo: f64, hi: f64 },

    #[error("non-Hermitian input: max |rho - rho^dagger| = {0:.3e}")]
    NonHermitian(f64),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
