//! Optimization traces and results shared by every algorithm.

use num_complex::Complex64;
use rectenna_model::WaveformPrecoder;

/// One iteration of an iterative design.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// Value of the convex surrogate objective; non-increasing over
    /// iterations for every successive-approximation algorithm here.
    pub surrogate: f64,
    /// True per-user output voltage of the current iterate.
    pub vout_per_user: Vec<f64>,
    /// Relative Frobenius step of the Gram (or stacked weight) iterate.
    pub step_frobenius: f64,
    /// Extreme eigenvalue (or user tie) was numerically degenerate.
    pub degenerate: bool,
    /// Auxiliary trace variables per user.
    pub t_vars: Vec<Vec<Complex64>>,
    /// Randomized rank-1 extraction: worst relative error of the two
    /// trace-preservation identities this iteration, when applicable.
    pub identity_residual: Option<f64>,
    /// Rank-reduction audit: per-block second-to-top eigenvalue ratio of
    /// the reduced iterate, when applicable.
    pub block_rank_ratios: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct OptimizationTrace {
    pub iterations: Vec<IterationRecord>,
    pub notes: Vec<String>,
}

impl OptimizationTrace {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    /// Largest increase of the surrogate between consecutive iterations
    /// (zero for a perfectly monotone trace).
    pub fn max_surrogate_increase(&self) -> f64 {
        self.iterations
            .windows(2)
            .map(|w| w[1].surrogate - w[0].surrogate)
            .fold(0.0f64, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgStatus {
    Converged,
    MaxIter,
}

/// Final design: the stacked precoder, an audit of per-user voltages,
/// and the iteration trace. Channel-hardening designs also expose their
/// frequency-domain weight vectors.
#[derive(Debug, Clone)]
pub struct PrecoderResult {
    pub precoder: WaveformPrecoder,
    pub vout_per_user: Vec<f64>,
    pub trace: OptimizationTrace,
    pub status: AlgStatus,
    /// Per-user frequency-domain weights (hardening designs).
    pub p_vectors: Option<Vec<Vec<Complex64>>>,
    /// Stacked normalized weight vector (hardening designs).
    pub p_bar: Option<Vec<Complex64>>,
    /// Per-user asymptotic voltages (hardening designs).
    pub vout_asymptotic: Option<Vec<f64>>,
}

impl PrecoderResult {
    pub fn min_vout(&self) -> f64 {
        self.vout_per_user.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum_vout(&self) -> f64 {
        self.vout_per_user.iter().sum()
    }

    pub fn weighted_sum_vout(&self, weights: &[f64]) -> f64 {
        self.vout_per_user
            .iter()
            .zip(weights)
            .map(|(v, w)| v * w)
            .sum()
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}
