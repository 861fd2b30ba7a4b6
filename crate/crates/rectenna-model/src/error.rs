use thiserror::Error;

#[derive(Debug, Error)]
pub enum RectennaError {
    #[error("invalid rectifier parameter: {0}")]
    InvalidParams(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("channel length {len} does not factor into {m} antennas x {n} tones")]
    BadLayout { len: usize, m: usize, n: usize },
    #[error("precoder exceeds power budget: |s|^2 = {norm_sq} > {budget}")]
    BudgetExceeded { norm_sq: f64, budget: f64 },
    #[error("sampling must cover an integer number of fundamental periods, got {0}")]
    NonIntegerPeriod(f64),
    #[error("{samples} samples per period alias the order-{max_harmonic} intermodulation products")]
    AliasedSampling { samples: usize, max_harmonic: usize },
    #[error("asymptotic evaluation requires the (E, Lambda) prefactors")]
    MissingAsymptoticPrefactors,
    #[error("prefactors only apply to the asymptotic coupling variant")]
    UnexpectedPrefactors,
    #[error("negative user weight {0}")]
    NegativeWeight(f64),
    #[error("quantity proven real has imaginary residue {residue:.3e} (tolerance {tolerance:.3e})")]
    ImaginaryResidue { residue: f64, tolerance: f64 },
    #[error(transparent)]
    Linalg(#[from] cx_linalg::CxLinalgError),
}
