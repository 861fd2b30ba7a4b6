//! Waveform optimization for multi-antenna multi-sine power transfer.
//!
//! Eight iterative designs (single-user, weighted-sum, max-min, and
//! their channel-hardening variants) plus four reference baselines.
//! Every algorithm consumes a channel realization and a power budget and
//! returns a stacked precoder with an iteration trace. Invocations are
//! deterministic given their inputs and RNG stream, and independent
//! invocations can run in parallel.

mod baselines;
mod che;
mod config;
mod error;
mod maxmin;
mod su;
mod support;
mod trace;
mod wsum;

pub use baselines::{
    baseline_ass, baseline_mu_up, baseline_up_mrt, fairness_weights, tdma_compose,
};
pub use che::{che_max_min_randomized, che_max_min_rr, che_wsum};
pub use config::{AlgorithmConfig, Budget, InitStrategy, StopRule};
pub use error::WaveformError;
pub use maxmin::{max_min_rand, max_min_rr};
pub use su::su_wpt;
pub use trace::{AlgStatus, IterationRecord, OptimizationTrace, PrecoderResult};
pub use wsum::{wsum, wsum_s};
