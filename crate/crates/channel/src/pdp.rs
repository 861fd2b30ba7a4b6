//! Power delay profiles: tap delays and average powers of the tapped
//! delay line. Profiles are declared data, not code; the bundled default
//! approximates the indoor NLOS model-E profile and ships in the same
//! text format user-supplied profiles use.

use crate::error::ChannelError;

const DEFAULT_TGN_E: &str = include_str!("../data/tgn_model_e.pdp");

/// Named built-in profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PdpId {
    /// Bundled indoor NLOS model-E approximation (18 taps, 0..730 ns).
    TgnModelE,
    /// Single tap at zero delay: frequency-flat.
    FlatSingleTap,
    /// A profile loaded from a user file, keyed by its path or label.
    Custom(String),
}

impl PdpId {
    pub fn parse(name: &str) -> Result<Self, ChannelError> {
        match name {
            "tgn_model_e" => Ok(Self::TgnModelE),
            "flat" => Ok(Self::FlatSingleTap),
            other => Err(ChannelError::UnknownPdp(other.to_string())),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Self::TgnModelE => "tgn_model_e",
            Self::FlatSingleTap => "flat",
            Self::Custom(label) => label,
        }
    }
}

/// Tap delays (seconds, nondecreasing) and average powers (linear,
/// positive) normalized to unit total power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    taps: Vec<(f64, f64)>,
}

impl PowerDelayProfile {
    pub fn resolve(id: &PdpId) -> Result<Self, ChannelError> {
        match id {
            PdpId::TgnModelE => Self::parse(DEFAULT_TGN_E),
            PdpId::FlatSingleTap => Self::new(vec![(0.0, 1.0)]),
            PdpId::Custom(label) => Err(ChannelError::UnknownPdp(format!(
                "custom profile {label:?} must be loaded with PowerDelayProfile::parse"
            ))),
        }
    }

    /// Build from (delay seconds, linear power) pairs; powers are
    /// normalized to sum to one.
    pub fn new(taps: Vec<(f64, f64)>) -> Result<Self, ChannelError> {
        if taps.is_empty() {
            return Err(ChannelError::PdpInvalid("no taps".into()));
        }
        let mut total = 0.0;
        let mut prev = f64::NEG_INFINITY;
        for &(delay, power) in &taps {
            if !delay.is_finite() || delay < 0.0 {
                return Err(ChannelError::PdpInvalid(format!("bad delay {delay}")));
            }
            if delay < prev {
                return Err(ChannelError::PdpInvalid(
                    "delays must be nondecreasing".into(),
                ));
            }
            prev = delay;
            if !(power > 0.0) || !power.is_finite() {
                return Err(ChannelError::PdpInvalid(format!("bad power {power}")));
            }
            total += power;
        }
        let taps = taps
            .into_iter()
            .map(|(d, p)| (d, p / total))
            .collect();
        Ok(Self { taps })
    }

    /// Parse the `delay_ns,power_db` text format. Lines starting with
    /// `#` (after trimming) and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, ChannelError> {
        let mut taps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let delay_ns: f64 = parts
                .next()
                .ok_or_else(|| ChannelError::PdpParse {
                    line: idx + 1,
                    reason: "missing delay".into(),
                })?
                .trim()
                .parse()
                .map_err(|e| ChannelError::PdpParse {
                    line: idx + 1,
                    reason: format!("delay: {e}"),
                })?;
            let power_db: f64 = parts
                .next()
                .ok_or_else(|| ChannelError::PdpParse {
                    line: idx + 1,
                    reason: "missing power".into(),
                })?
                .trim()
                .parse()
                .map_err(|e| ChannelError::PdpParse {
                    line: idx + 1,
                    reason: format!("power: {e}"),
                })?;
            if parts.next().is_some() {
                return Err(ChannelError::PdpParse {
                    line: idx + 1,
                    reason: "expected exactly two fields".into(),
                });
            }
            taps.push((delay_ns * 1e-9, 10f64.powf(power_db / 10.0)));
        }
        Self::new(taps)
    }

    pub fn taps(&self) -> &[(f64, f64)] {
        &self.taps
    }

    pub fn n_taps(&self) -> usize {
        self.taps.len()
    }
}
