use diqkd_sdp::SdpError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("invalid subsystem index {index} for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("behavior does not match game alphabets: {0}")]
    AlphabetMismatch(String),
    #[error("unknown operator letter: {0}")]
    UnknownLetter(String),
    #[error("moment {0} is not part of the relaxation")]
    MissingMoment(String),
    #[error("relaxation is infeasible: {0}")]
    Infeasible(String),
    #[error("solver failed at node {node} (status {status}, gap {gap:e})")]
    SolverFailed { node: usize, status: String, gap: f64 },
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
