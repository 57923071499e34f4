use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or iteration did not reach its tolerance.
    #[error("no convergence: {0}")]
    NonConvergence(String),
    /// A quadrature failed to settle under refinement.
    #[error("not integrable: {0}")]
    NonIntegrable(String),
    /// The radial or spectral grid does not cover the required region.
    #[error("inadequate grid: {0}")]
    GridInadequate(String),
    /// A regression had a singular normal matrix.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
