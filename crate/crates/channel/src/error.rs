use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("tone grid violates omega_1 > (N-1)*delta/2 (f1 = {f1} Hz, need > {need} Hz)")]
    GridTooLow { f1: f64, need: f64 },
    #[error("unknown power delay profile id {0:?}")]
    UnknownPdp(String),
    #[error("power delay profile parse error at line {line}: {reason}")]
    PdpParse { line: usize, reason: String },
    #[error("power delay profile invalid: {0}")]
    PdpInvalid(String),
    #[error("exact hardening needs M >= K*N orthogonal directions (M = {m}, K*N = {kn})")]
    HardeningUnderdetermined { m: usize, kn: usize },
    #[error("large-scale gain must be positive, got {0}")]
    NonPositiveGain(f64),
}
