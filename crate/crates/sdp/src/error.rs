use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("randomization count must be positive")]
    ZeroCandidates,
    #[error(transparent)]
    Linalg(#[from] cx_linalg::CxLinalgError),
}
