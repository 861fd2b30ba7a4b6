//! Nonlinear rectenna DC voltage model.
//!
//! The rectifier maps a received multi-sine waveform to a DC voltage
//! through a 4th-order Taylor truncation of the diode law. This crate
//! evaluates that voltage in every representation the optimizers need —
//! a brute-force time average, the stacked quartic form over masked
//! block-diagonal coupling matrices, frequency-domain reductions and the
//! channel-hardened asymptotic closed forms — and builds the coupling
//! matrices themselves. All functions are pure and thread-safe.

mod coupling;
mod error;
mod types;
mod vout;

pub use coupling::{
    build_coupling, CouplingMatrices, FreqCouplingMatrices, FreqVariant, MaskedCoupling,
};
pub use error::RectennaError;
pub use types::{beta_coefficients, AuxVars, BetaCoefficients, RectifierParams, WaveformPrecoder};
pub use vout::{
    aux_from_gram, aux_from_vector, vout_asymptotic_uniform, vout_freq, vout_quartic,
    vout_time_oracle, weighted_sum_vout, AsymptoticGain, OracleSampling, IM_RESIDUE_TOL,
};
