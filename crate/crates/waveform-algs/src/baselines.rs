//! Non-iterative reference designs: single-sinewave allocation, uniform
//! power with matched beamforming, the multi-user uniform scheme,
//! fairness-aware weights and time-division composition.

use channel::ChannelRealization;
use cx_linalg::{vnorm, Complex64};
use rectenna_model::{BetaCoefficients, WaveformPrecoder};

use crate::config::AlgorithmConfig;
use crate::error::WaveformError;
use crate::support::vout_users;
use crate::trace::{AlgStatus, OptimizationTrace, PrecoderResult};

fn single_user(ch: &ChannelRealization) -> Result<(), WaveformError> {
    if ch.n_users() != 1 {
        return Err(WaveformError::WrongUserCount {
            expected: "1".into(),
            got: ch.n_users(),
        });
    }
    Ok(())
}

fn wrap(
    precoder: WaveformPrecoder,
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
) -> Result<PrecoderResult, WaveformError> {
    let vout_per_user = vout_users(&precoder, ch, beta)?;
    Ok(PrecoderResult {
        precoder,
        vout_per_user,
        trace: OptimizationTrace::default(),
        status: AlgStatus::Converged,
        p_vectors: None,
        p_bar: None,
        vout_asymptotic: None,
    })
}

/// All power on the tone with the highest channel power gain (lowest
/// index on ties), matched beamforming spatially. Optimal under the
/// 2nd-order-only voltage model.
pub fn baseline_ass(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    single_user(ch)?;
    let (m, n) = (ch.n_antennas, ch.n_tones);
    let p_total = cfg.budget.power(m);
    let gains = ch.tone_norms(0);
    let best = (0..n)
        .max_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(b.cmp(&a)))
        .unwrap();
    if gains[best] == 0.0 {
        return Err(WaveformError::ZeroChannel);
    }
    let mut s = vec![Complex64::new(0.0, 0.0); m * n];
    let h = ch.spatial(0, best);
    for (ant, hv) in h.iter().enumerate() {
        s[best * m + ant] = p_total.sqrt() * hv.conj() / gains[best];
    }
    wrap(WaveformPrecoder::new(m, n, s)?, ch, beta)
}

/// Uniform power across (nonzero-gain) tones with matched beamforming.
pub fn baseline_up_mrt(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    single_user(ch)?;
    let (m, n) = (ch.n_antennas, ch.n_tones);
    let p_total = cfg.budget.power(m);
    let gains = ch.tone_norms(0);
    let live: Vec<usize> = (0..n).filter(|&i| gains[i] > 0.0).collect();
    if live.is_empty() {
        return Err(WaveformError::ZeroChannel);
    }
    let amp = (p_total / live.len() as f64).sqrt();
    let mut s = vec![Complex64::new(0.0, 0.0); m * n];
    for &tone in &live {
        let h = ch.spatial(0, tone);
        for (ant, hv) in h.iter().enumerate() {
            s[tone * m + ant] = amp * hv.conj() / gains[tone];
        }
    }
    wrap(WaveformPrecoder::new(m, n, s)?, ch, beta)
}

/// Multi-user uniform power: sum of the users' matched beams per tone,
/// power split uniformly by the stacked normalization.
pub fn baseline_mu_up(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    let (m, n, k) = (ch.n_antennas, ch.n_tones, ch.n_users());
    let p_total = cfg.budget.power(m);
    let mut s = vec![Complex64::new(0.0, 0.0); m * n];
    let mut total = 0.0;
    for tone in 0..n {
        let mut dir = vec![Complex64::new(0.0, 0.0); m];
        for q in 0..k {
            let h = ch.spatial(q, tone);
            let norm = vnorm(h);
            if norm == 0.0 {
                continue;
            }
            for (d, hv) in dir.iter_mut().zip(h) {
                *d += hv.conj() / norm;
            }
        }
        for (ant, d) in dir.iter().enumerate() {
            s[tone * m + ant] = *d;
            total += d.norm_sqr();
        }
    }
    if total == 0.0 {
        return Err(WaveformError::ZeroChannel);
    }
    let rescale = (p_total / total).sqrt();
    for z in s.iter_mut() {
        *z *= rescale;
    }
    wrap(WaveformPrecoder::new(m, n, s)?, ch, beta)
}

/// Fairness-aware weights: inverse of the voltage each user would get
/// from uniform-power matched beamforming serving it alone, normalized
/// to sum to one.
pub fn fairness_weights(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<Vec<f64>, WaveformError> {
    cfg.validate()?;
    let k = ch.n_users();
    let mut inv = Vec::with_capacity(k);
    for q in 0..k {
        let solo = ChannelRealization {
            n_antennas: ch.n_antennas,
            n_tones: ch.n_tones,
            users: vec![ch.users[q].clone()],
            seed: ch.seed,
            config_hash: ch.config_hash,
        };
        let alpha = baseline_up_mrt(&solo, beta, cfg)?.vout_per_user[0];
        if !(alpha > 0.0) {
            return Err(WaveformError::ZeroChannel);
        }
        inv.push(1.0 / alpha);
    }
    let total: f64 = inv.iter().sum();
    Ok(inv.into_iter().map(|v| v / total).collect())
}

/// Time-shared composition of per-user voltages: user q is served for a
/// fraction of the time and harvests nothing elsewhere, so its average
/// voltage is its share times its dedicated-slot voltage.
pub fn tdma_compose(per_user_vout: &[f64], shares: &[f64]) -> Result<Vec<f64>, WaveformError> {
    if per_user_vout.len() != shares.len() {
        return Err(WaveformError::BadShares(format!(
            "expected {} shares, got {}",
            per_user_vout.len(),
            shares.len()
        )));
    }
    let total: f64 = shares.iter().sum();
    if shares.iter().any(|&s| s < 0.0 || !s.is_finite()) || total > 1.0 + 1e-9 {
        return Err(WaveformError::BadShares(
            "shares must be nonnegative and sum to at most one".into(),
        ));
    }
    Ok(per_user_vout
        .iter()
        .zip(shares)
        .map(|(v, s)| v * s)
        .collect())
}
