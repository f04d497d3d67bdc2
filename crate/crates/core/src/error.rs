use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point lies on the Dirac string (r + z = 0)")]
    DiracString,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("degenerate Hamiltonian: a = 0 and b = 0")]
    DegenerateHamiltonian,

    #[error("series did not converge: {0}")]
    Divergence(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("unitarity violation: {0}")]
    UnitarityViolation(String),

    #[error("pole in realization: {0}")]
    Pole(String),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("continuous spectrum: {0}")]
    ContinuousSpectrum(String),

    #[error("non-monotone errors, no convergence order estimate: {0}")]
    NonMonotone(String),
}
