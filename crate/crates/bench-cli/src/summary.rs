//! Aggregation: per-sweep-point means with percentile bootstrap
//! confidence intervals, emitted as a JSON sidecar.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub algorithm: String,
    pub variant: String,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub distance_m: f64,
    pub budget: String,
    pub trials: usize,
    pub mean_vout_min: f64,
    pub ci_vout_min: [f64; 2],
    pub mean_vout_sum: f64,
    pub ci_vout_sum: [f64; 2],
    pub mean_iterations: f64,
    pub mean_wall_clock_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceValue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceValue {
    pub metric: String,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryDoc {
    pub schema_version: u32,
    pub preset: String,
    pub seed: u64,
    pub points: Vec<PointSummary>,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// 95% percentile bootstrap interval for the mean, deterministic for a
/// fixed seed. Collapses to the point value for singleton samples.
pub fn bootstrap_ci(xs: &[f64], seed: u64) -> [f64; 2] {
    if xs.is_empty() {
        return [f64::NAN, f64::NAN];
    }
    if xs.len() == 1 {
        return [xs[0], xs[0]];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut acc = 0.0;
        for _ in 0..xs.len() {
            acc += xs[rng.gen_range(0..xs.len())];
        }
        means.push(acc / xs.len() as f64);
    }
    means.sort_by(f64::total_cmp);
    let lo = means[(0.025 * (BOOTSTRAP_RESAMPLES - 1) as f64).round() as usize];
    let hi = means[(0.975 * (BOOTSTRAP_RESAMPLES - 1) as f64).round() as usize];
    [lo, hi]
}
