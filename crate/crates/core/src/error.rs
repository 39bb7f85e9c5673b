use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid probe: {0}")]
    InvalidProbe(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("numerical singularity: {0}")]
    NumericalSingularity(String),
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    #[error("bracket failure: {0}")]
    BracketFailure(String),
    #[error("cutoff too small: {0}")]
    Cutoff(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
