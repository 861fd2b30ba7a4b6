//! Shared algorithm configuration.

use num_complex::Complex64;

use crate::error::WaveformError;

/// Transmit power budget: either a total power in watts, or a fixed
/// radiated budget `M * P` in watts (per-antenna power shrinks as the
/// array grows).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    TotalPower(f64),
    Eirp(f64),
}

impl Budget {
    /// Per-array transmit power P for an M-antenna transmitter.
    pub fn power(&self, m: usize) -> f64 {
        match self {
            Budget::TotalPower(p) => *p,
            Budget::Eirp(e) => e / m as f64,
        }
    }

    /// Radiated budget E = M * P.
    pub fn radiated(&self, m: usize) -> f64 {
        match self {
            Budget::TotalPower(p) => p * m as f64,
            Budget::Eirp(e) => *e,
        }
    }
}

/// Stopping rule of the iterative algorithms: relative Frobenius step of
/// the Gram iterate, or relative change of the voltage objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    Frobenius,
    Objective,
}

/// Initialization of the iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum InitStrategy {
    /// Uniform power over tones with matched spatial beamforming.
    UpMrt,
    /// All power on the strongest tone.
    Ass,
    /// Caller-provided starting point (frequency-domain weights or a
    /// stacked precoder, depending on the algorithm's variable space).
    Custom(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmConfig {
    /// Relative stopping threshold.
    pub epsilon: f64,
    pub max_iter: usize,
    pub init: InitStrategy,
    /// Randomization candidate count.
    pub t_rand: usize,
    pub budget: Budget,
    pub stop_rule: StopRule,
    /// Duality-gap tolerance for embedded SDP solves.
    pub sdp_tol: f64,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            max_iter: 200,
            init: InitStrategy::UpMrt,
            t_rand: 50,
            budget: Budget::TotalPower(1.0),
            stop_rule: StopRule::Frobenius,
            sdp_tol: 1e-9,
        }
    }
}

impl AlgorithmConfig {
    pub fn validate(&self) -> Result<(), WaveformError> {
        if !(self.epsilon > 0.0) {
            return Err(WaveformError::InvalidConfig("epsilon must be positive".into()));
        }
        if self.t_rand == 0 {
            return Err(WaveformError::InvalidConfig("t_rand must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(WaveformError::InvalidConfig("max_iter must be at least 1".into()));
        }
        let (Budget::TotalPower(w) | Budget::Eirp(w)) = self.budget;
        if !(w > 0.0) {
            return Err(WaveformError::InvalidConfig("budget must be positive".into()));
        }
        Ok(())
    }
}
