use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("root finder did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("Fock cutoff {needed} exceeds the allowed maximum {max}")]
    CutoffExceeded { needed: usize, max: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("all coefficients are zero")]
    AllZero,

    #[error("target has degree 0; no photon additions are needed")]
    DegreeZero,

    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("invalid beam splitter: {0}")]
    InvalidBeamSplitter(String),

    #[error("invalid phase state: {0}")]
    InvalidPhaseState(String),

    #[error("invalid root order: {0}")]
    InvalidOrder(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("stagewise configuration failed validation: {0}")]
    ValidationFailure(String),
}
