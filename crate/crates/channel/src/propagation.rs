//! Propagation configuration, path loss and the uniform tone grid.

use crate::error::ChannelError;
use crate::pdp::PdpId;

/// Speed of light used by the free-space term. The round 3e8 value
/// reproduces the 60.046 dB reference loss at 10 m / 2.4 GHz.
const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Breakpoint distance of the indoor model: free space below, exponent
/// 3.5 beyond, continuous at the breakpoint.
const BREAKPOINT_M: f64 = 20.0;
const BEYOND_EXPONENT: f64 = 3.5;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig {
    /// Carrier frequency in Hz.
    pub f_c: f64,
    /// Total bandwidth in Hz; tones are spaced `bandwidth / n_tones`.
    pub bandwidth: f64,
    pub n_tones: usize,
    pub n_antennas: usize,
    pub n_users: usize,
    /// Per-user link distance in meters.
    pub distances_m: Vec<f64>,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub pdp_id: PdpId,
    pub seed: u64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            f_c: 2.4e9,
            bandwidth: 10e6,
            n_tones: 1,
            n_antennas: 1,
            n_users: 1,
            distances_m: vec![10.0],
            tx_gain_db: 0.0,
            rx_gain_db: 0.0,
            pdp_id: PdpId::TgnModelE,
            seed: 0,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.n_tones == 0 || self.n_antennas == 0 || self.n_users == 0 {
            return Err(ChannelError::InvalidConfig(
                "n_tones, n_antennas and n_users must all be at least 1".into(),
            ));
        }
        if !(self.f_c > 0.0) || !(self.bandwidth > 0.0) {
            return Err(ChannelError::InvalidConfig(
                "carrier frequency and bandwidth must be positive".into(),
            ));
        }
        if self.distances_m.len() != self.n_users {
            return Err(ChannelError::InvalidConfig(format!(
                "expected {} distances, got {}",
                self.n_users,
                self.distances_m.len()
            )));
        }
        for &d in &self.distances_m {
            if !(d > 0.0) {
                return Err(ChannelError::NonPositiveDistance(d));
            }
        }
        tone_grid(self).map(|_| ())
    }

    /// Stable 64-bit fingerprint of the configuration, recorded in
    /// realization metadata.
    pub fn fingerprint(&self) -> u64 {
        let repr = format!(
            "fc={:e};bw={:e};n={};m={};k={};d={:?};tx={};rx={};pdp={};seed={}",
            self.f_c,
            self.bandwidth,
            self.n_tones,
            self.n_antennas,
            self.n_users,
            self.distances_m,
            self.tx_gain_db,
            self.rx_gain_db,
            self.pdp_id.label(),
            self.seed
        );
        fnv1a(repr.as_bytes())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}

/// Path loss in dB: free space up to the 20 m breakpoint, 35 dB/decade
/// beyond it.
pub fn path_loss_db(d: f64, cfg: &PropagationConfig) -> Result<f64, ChannelError> {
    if !(d > 0.0) {
        return Err(ChannelError::NonPositiveDistance(d));
    }
    let free_space = |dist: f64| 20.0 * (4.0 * std::f64::consts::PI * dist * cfg.f_c / SPEED_OF_LIGHT).log10();
    if d <= BREAKPOINT_M {
        Ok(free_space(d))
    } else {
        Ok(free_space(BREAKPOINT_M) + 10.0 * BEYOND_EXPONENT * (d / BREAKPOINT_M).log10())
    }
}

/// N tones uniformly spaced by `bandwidth/N`, centered on the carrier:
/// `f_n = f_c + (n - (N+1)/2) * delta_f`.
pub fn tone_grid(cfg: &PropagationConfig) -> Result<Vec<f64>, ChannelError> {
    let n = cfg.n_tones;
    let delta_f = cfg.bandwidth / n as f64;
    let grid: Vec<f64> = (1..=n)
        .map(|i| cfg.f_c + (i as f64 - (n as f64 + 1.0) / 2.0) * delta_f)
        .collect();
    let need = (n as f64 - 1.0) * delta_f / 2.0;
    if grid[0] <= need {
        return Err(ChannelError::GridTooLow { f1: grid[0], need });
    }
    Ok(grid)
}
