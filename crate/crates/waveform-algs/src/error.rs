use thiserror::Error;

#[derive(Debug, Error)]
pub enum WaveformError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} users, got {got}")]
    WrongUserCount { expected: String, got: usize },
    #[error("rank-reduction max-min supports at most 3 users, got {0}")]
    TooManyUsersForRr(usize),
    #[error("user weights invalid: {0}")]
    BadWeights(String),
    #[error("large-scale gain must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("custom initialization has wrong length: expected {expected}, got {got}")]
    BadInit { expected: usize, got: usize },
    #[error("time-share fractions invalid: {0}")]
    BadShares(String),
    #[error("channel is identically zero; no serving direction exists")]
    ZeroChannel,
    #[error(transparent)]
    Rectenna(#[from] rectenna_model::RectennaError),
    #[error(transparent)]
    Linalg(#[from] cx_linalg::CxLinalgError),
    #[error(transparent)]
    Sdp(#[from] sdp::SdpError),
}
