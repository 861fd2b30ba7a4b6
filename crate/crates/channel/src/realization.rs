//! Channel realizations: tapped-delay-line generation, synthetic
//! hardened channels and the frequency-major stacked layout shared with
//! the waveform precoder.

use std::io::Write;

use num_complex::Complex64;

use crate::error::ChannelError;
use crate::pdp::PowerDelayProfile;
use crate::propagation::{path_loss_db, tone_grid, PropagationConfig};
use crate::rng::{derive_stream, standard_normal_pair, DOMAIN_HARDENED, DOMAIN_TAP_GAINS};

/// Stacked channel of one user: `h[(tone)*M + antenna]`, plus the
/// linear large-scale gain.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannel {
    pub h: Vec<Complex64>,
    pub lambda: f64,
}

/// Multi-user channel realization with generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub n_antennas: usize,
    pub n_tones: usize,
    pub users: Vec<UserChannel>,
    pub seed: u64,
    pub config_hash: u64,
}

/// Flat index of (tone, antenna) in the stacked frequency-major layout.
pub fn flat_index(n_antennas: usize, tone: usize, antenna: usize) -> usize {
    tone * n_antennas + antenna
}

/// Inverse of `flat_index`: (tone, antenna).
pub fn unflatten_index(n_antennas: usize, idx: usize) -> (usize, usize) {
    (idx / n_antennas, idx % n_antennas)
}

impl ChannelRealization {
    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn h(&self, user: usize) -> &[Complex64] {
        &self.users[user].h
    }

    pub fn lambda(&self, user: usize) -> f64 {
        self.users[user].lambda
    }

    /// Spatial block `h_{q,n}` of a user at one tone.
    pub fn spatial(&self, user: usize, tone: usize) -> &[Complex64] {
        let m = self.n_antennas;
        &self.users[user].h[tone * m..(tone + 1) * m]
    }

    /// Per-tone spatial channel norms of a user.
    pub fn tone_norms(&self, user: usize) -> Vec<f64> {
        (0..self.n_tones)
            .map(|t| {
                self.spatial(user, t)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Dump as CSV with columns (user, tone, antenna, re, im).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "user,tone,antenna,re,im")?;
        for (q, user) in self.users.iter().enumerate() {
            for idx in 0..user.h.len() {
                let (tone, ant) = unflatten_index(self.n_antennas, idx);
                let z = user.h[idx];
                writeln!(w, "{q},{tone},{ant},{:.17e},{:.17e}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Draw one multi-user realization: independent complex Gaussian tap
/// gains with PDP variances per (user, antenna) substream, evaluated at
/// each tone of the grid and scaled by the linear path gain.
pub fn gen_realization(cfg: &PropagationConfig) -> Result<ChannelRealization, ChannelError> {
    cfg.validate()?;
    let pdp = PowerDelayProfile::resolve(&cfg.pdp_id)?;
    gen_realization_with_pdp(cfg, &pdp)
}

/// Same as `gen_realization` but with an explicit (possibly custom)
/// profile instead of a named one.
pub fn gen_realization_with_pdp(
    cfg: &PropagationConfig,
    pdp: &PowerDelayProfile,
) -> Result<ChannelRealization, ChannelError> {
    cfg.validate()?;
    let grid = tone_grid(cfg)?;
    let (m, n, k) = (cfg.n_antennas, cfg.n_tones, cfg.n_users);

    let mut users = Vec::with_capacity(k);
    for q in 0..k {
        let pl_db = path_loss_db(cfg.distances_m[q], cfg)?;
        let lambda = 10f64.powf((-pl_db + cfg.tx_gain_db + cfg.rx_gain_db) / 10.0);
        let mut h = vec![Complex64::new(0.0, 0.0); m * n];
        for ant in 0..m {
            let mut rng = derive_stream(cfg.seed, &[DOMAIN_TAP_GAINS, q as u64, ant as u64]);
            // tap gains in fixed tap order define the substream contract
            let gains: Vec<Complex64> = pdp
                .taps()
                .iter()
                .map(|&(_, power)| {
                    let (zr, zi) = standard_normal_pair(&mut rng);
                    let sigma = (power * lambda / 2.0).sqrt();
                    Complex64::new(sigma * zr, sigma * zi)
                })
                .collect();
            for (tone, &f) in grid.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (&(delay, _), &g) in pdp.taps().iter().zip(&gains) {
                    let phase = -2.0 * std::f64::consts::PI * f * delay;
                    acc += g * Complex64::from_polar(1.0, phase);
                }
                h[flat_index(m, tone, ant)] = acc;
            }
        }
        users.push(UserChannel { h, lambda });
    }
    Ok(ChannelRealization {
        n_antennas: m,
        n_tones: n,
        users,
        seed: cfg.seed,
        config_hash: cfg.fingerprint(),
    })
}

/// How `gen_hardened` builds its spatial vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardeningMode {
    /// Deterministic orthogonal directions: `||h_{q,n}||^2 = M*Lambda_q`
    /// exactly and all cross inner products are exactly zero. Requires
    /// `M >= K*N`.
    Exact,
    /// i.i.d. CN(0, Lambda_q) entries; hardening holds in the limit.
    Gaussian,
}

/// Synthetic channels for asymptotic tests. `lambdas` carries one
/// large-scale gain per user.
pub fn gen_hardened(
    lambdas: &[f64],
    m: usize,
    n: usize,
    mode: HardeningMode,
    seed: u64,
) -> Result<ChannelRealization, ChannelError> {
    if lambdas.is_empty() || m == 0 || n == 0 {
        return Err(ChannelError::InvalidConfig(
            "need at least one user, antenna and tone".into(),
        ));
    }
    for &l in lambdas {
        if !(l > 0.0) {
            return Err(ChannelError::NonPositiveGain(l));
        }
    }
    let k = lambdas.len();
    let mut users = Vec::with_capacity(k);
    match mode {
        HardeningMode::Exact => {
            if m < k * n {
                return Err(ChannelError::HardeningUnderdetermined { m, kn: k * n });
            }
            for (q, &lambda) in lambdas.iter().enumerate() {
                let mut h = vec![Complex64::new(0.0, 0.0); m * n];
                for tone in 0..n {
                    let direction = q * n + tone;
                    h[flat_index(m, tone, direction)] =
                        Complex64::new((m as f64 * lambda).sqrt(), 0.0);
                }
                users.push(UserChannel { h, lambda });
            }
        }
        HardeningMode::Gaussian => {
            for (q, &lambda) in lambdas.iter().enumerate() {
                let mut h = vec![Complex64::new(0.0, 0.0); m * n];
                for ant in 0..m {
                    let mut rng = derive_stream(seed, &[DOMAIN_HARDENED, q as u64, ant as u64]);
                    for tone in 0..n {
                        let (zr, zi) = standard_normal_pair(&mut rng);
                        let sigma = (lambda / 2.0).sqrt();
                        h[flat_index(m, tone, ant)] = Complex64::new(sigma * zr, sigma * zi);
                    }
                }
                users.push(UserChannel { h, lambda });
            }
        }
    }
    Ok(ChannelRealization {
        n_antennas: m,
        n_tones: n,
        users,
        seed,
        config_hash: 0,
    })
}
