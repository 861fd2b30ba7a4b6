use thiserror::Error;

#[derive(Debug, Error)]
pub enum CxLinalgError {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("eigenvalue iteration failed to converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { pivot: f64, index: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.6e} below clamp threshold {threshold:.6e})")]
    NotPsd { eigenvalue: f64, threshold: f64 },
    #[error("linear system is singular")]
    Singular,
}
