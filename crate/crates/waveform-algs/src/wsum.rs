//! Weighted-sum voltage maximization: the full stacked-precoder design
//! (spatial beamforming and frequency allocation jointly) and the
//! simplified variant that fixes per-tone spatial beamforming to the
//! dominant eigenvector of the weighted channel correlation and then
//! optimizes only the frequency domain.

use channel::ChannelRealization;
use cx_linalg::{cdot, dominant_eigvec, min_eigvec, vnorm, Complex64, CxMat, HermitianMatrix};
use rectenna_model::{
    aux_from_vector, build_coupling, BetaCoefficients, CouplingMatrices, FreqCouplingMatrices,
    WaveformPrecoder,
};

use crate::config::{AlgorithmConfig, InitStrategy, StopRule};
use crate::error::WaveformError;
use crate::support::{
    check_weights, g_exact, rank1_gram_step, surrogate_matrix, surrogate_value,
    weighted_surrogate_matrix, vout_users, SurrogateScale,
};
use crate::trace::{AlgStatus, IterationRecord, OptimizationTrace, PrecoderResult};

/// Stacked starting precoder for the joint design.
pub(crate) fn init_stacked(
    init: &InitStrategy,
    ch: &ChannelRealization,
    weights: &[f64],
    p_total: f64,
) -> Result<Vec<Complex64>, WaveformError> {
    let (m, n, k) = (ch.n_antennas, ch.n_tones, ch.n_users());
    match init {
        InitStrategy::UpMrt => {
            // equal-gain combination of the users' matched beams per tone
            let mut s = vec![Complex64::new(0.0, 0.0); m * n];
            let mut total = 0.0;
            for tone in 0..n {
                let mut dir = vec![Complex64::new(0.0, 0.0); m];
                for q in 0..k {
                    if weights[q] == 0.0 {
                        continue;
                    }
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
            Ok(s)
        }
        InitStrategy::Ass => {
            // all power on the strongest weighted tone, along the
            // dominant direction of the weighted correlation there
            let mut best = (0usize, f64::NEG_INFINITY);
            for tone in 0..n {
                let score: f64 = (0..k)
                    .map(|q| {
                        weights[q] * ch.spatial(q, tone).iter().map(|z| z.norm_sqr()).sum::<f64>()
                    })
                    .sum();
                if score > best.1 {
                    best = (tone, score);
                }
            }
            if best.1 <= 0.0 {
                return Err(WaveformError::ZeroChannel);
            }
            let tone = best.0;
            let mut corr = CxMat::zeros(m, m);
            for q in 0..k {
                if weights[q] == 0.0 {
                    continue;
                }
                let hc: Vec<Complex64> = ch.spatial(q, tone).iter().map(|z| z.conj()).collect();
                corr.add_assign_scaled(&CxMat::outer(&hc, &hc), Complex64::new(weights[q], 0.0));
            }
            let dir = dominant_eigvec(&HermitianMatrix::from_mat(&corr)?)?;
            let mut s = vec![Complex64::new(0.0, 0.0); m * n];
            for (ant, d) in dir.vector.iter().enumerate() {
                s[tone * m + ant] = d * p_total.sqrt();
            }
            Ok(s)
        }
        InitStrategy::Custom(values) => {
            if values.len() != m * n {
                return Err(WaveformError::BadInit {
                    expected: m * n,
                    got: values.len(),
                });
            }
            Ok(values.clone())
        }
    }
}

/// Joint weighted-sum design over the stacked precoder.
pub fn wsum(
    ch: &ChannelRealization,
    weights: &[f64],
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    let k = ch.n_users();
    check_weights(weights, k)?;
    let (m, n) = (ch.n_antennas, ch.n_tones);
    let p_total = cfg.budget.power(m);
    let scale = SurrogateScale::exact(beta);

    let couplings: Vec<CouplingMatrices> = (0..k)
        .map(|q| build_coupling(ch.h(q), m, n))
        .collect::<Result<_, _>>()?;

    let s0 = init_stacked(&cfg.init, ch, weights, p_total)?;
    let mut t_prev: Vec<_> = couplings
        .iter()
        .map(|c| aux_from_vector(&s0, c))
        .collect::<Result<_, _>>()?;
    let mut s_prev = s0.clone();

    let mut trace = OptimizationTrace::default();
    let v0: Vec<f64> = t_prev
        .iter()
        .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
        .collect();
    let weighted0: f64 = v0.iter().zip(weights).map(|(v, w)| v * w).sum();
    trace.iterations.push(IterationRecord {
        surrogate: -weighted0,
        vout_per_user: v0,
        step_frobenius: f64::NAN,
        degenerate: false,
        t_vars: t_prev.iter().map(|t| t.as_slice().to_vec()).collect(),
        identity_residual: None,
        block_rank_ratios: None,
    });

    let mut status = AlgStatus::MaxIter;
    let mut best_s = s0;
    let mut best_obj = weighted0;

    for _l in 1..=cfg.max_iter {
        let parts: Vec<(f64, HermitianMatrix)> = couplings
            .iter()
            .zip(&t_prev)
            .zip(weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|((c, t), &w)| Ok((w, surrogate_matrix(c, t, scale)?)))
            .collect::<Result<_, WaveformError>>()?;
        let a1 = weighted_surrogate_matrix(&parts)?;
        let ev = min_eigvec(&a1)?;
        let s_new: Vec<Complex64> = ev.vector.iter().map(|z| z * p_total.sqrt()).collect();

        let t_new: Vec<_> = couplings
            .iter()
            .map(|c| aux_from_vector(&s_new, c))
            .collect::<Result<_, _>>()?;
        let step = rank1_gram_step(&s_new, &s_prev);
        let gamma: f64 = t_new
            .iter()
            .zip(&t_prev)
            .zip(weights)
            .map(|((t, tp), &w)| w * surrogate_value(t, tp, scale))
            .sum();
        let v_new: Vec<f64> = t_new
            .iter()
            .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
            .collect();
        let obj_new: f64 = v_new.iter().zip(weights).map(|(v, w)| v * w).sum();
        trace.iterations.push(IterationRecord {
            surrogate: gamma,
            vout_per_user: v_new,
            step_frobenius: step,
            degenerate: ev.degenerate,
            t_vars: t_new.iter().map(|t| t.as_slice().to_vec()).collect(),
            identity_residual: None,
            block_rank_ratios: None,
        });
        if obj_new > best_obj {
            best_obj = obj_new;
            best_s = s_new.clone();
        }

        let obj_prev: f64 = t_prev
            .iter()
            .zip(weights)
            .map(|(t, &w)| w * (scale.beta2 * t.t0() - g_exact(t, scale)))
            .sum();
        let stop = match cfg.stop_rule {
            StopRule::Frobenius => step <= cfg.epsilon,
            StopRule::Objective => {
                (obj_new - obj_prev).abs() / obj_new.max(f64::MIN_POSITIVE) <= cfg.epsilon
            }
        };
        t_prev = t_new;
        s_prev = s_new;
        if stop {
            status = AlgStatus::Converged;
            break;
        }
    }

    let precoder = WaveformPrecoder::new(m, n, best_s)?;
    let vout_per_user = vout_users(&precoder, ch, beta)?;
    Ok(PrecoderResult {
        precoder,
        vout_per_user,
        trace,
        status,
        p_vectors: None,
        p_bar: None,
        vout_asymptotic: None,
    })
}

/// Simplified weighted-sum design: per-tone spatial beamforming fixed to
/// the dominant eigenvector of the weighted channel correlation, then a
/// frequency-domain iteration over the effective channels.
pub fn wsum_s(
    ch: &ChannelRealization,
    weights: &[f64],
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    let k = ch.n_users();
    check_weights(weights, k)?;
    let (m, n) = (ch.n_antennas, ch.n_tones);
    let p_total = cfg.budget.power(m);
    let scale = SurrogateScale::exact(beta);

    // fixed spatial beamformers
    let mut beams: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut degenerate_beams = false;
    for tone in 0..n {
        let mut corr = CxMat::zeros(m, m);
        for q in 0..k {
            if weights[q] == 0.0 {
                continue;
            }
            let hc: Vec<Complex64> = ch.spatial(q, tone).iter().map(|z| z.conj()).collect();
            corr.add_assign_scaled(&CxMat::outer(&hc, &hc), Complex64::new(weights[q], 0.0));
        }
        let ev = dominant_eigvec(&HermitianMatrix::from_mat(&corr)?)?;
        degenerate_beams |= ev.degenerate;
        beams.push(ev.vector);
    }

    // effective per-tone channels h_e[q][n] = w_n^H conj(h_{q,n})
    let fcs: Vec<FreqCouplingMatrices> = (0..k)
        .map(|q| {
            let h_e: Vec<Complex64> = (0..n)
                .map(|tone| {
                    let hc: Vec<Complex64> =
                        ch.spatial(q, tone).iter().map(|z| z.conj()).collect();
                    cdot(&beams[tone], &hc)
                })
                .collect();
            FreqCouplingMatrices::effective(&h_e)
        })
        .collect();

    // frequency-domain iteration
    let gains: Vec<f64> = (0..n)
        .map(|tone| {
            (0..k)
                .map(|q| weights[q] * ch.spatial(q, tone).iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let p0 = crate::su::init_freq_weights(&cfg.init, &gains, p_total)?;
    let mut t_prev: Vec<_> = fcs
        .iter()
        .map(|fc| aux_from_vector(&p0, fc))
        .collect::<Result<_, _>>()?;
    let mut p_prev = p0.clone();

    let mut trace = OptimizationTrace::default();
    if degenerate_beams {
        trace
            .notes
            .push("dominant beam direction degenerate on at least one tone".into());
    }
    let v0: Vec<f64> = t_prev
        .iter()
        .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
        .collect();
    let weighted0: f64 = v0.iter().zip(weights).map(|(v, w)| v * w).sum();
    trace.iterations.push(IterationRecord {
        surrogate: -weighted0,
        vout_per_user: v0,
        step_frobenius: f64::NAN,
        degenerate: false,
        t_vars: t_prev.iter().map(|t| t.as_slice().to_vec()).collect(),
        identity_residual: None,
        block_rank_ratios: None,
    });

    let mut status = AlgStatus::MaxIter;
    let mut best_p = p0;
    let mut best_obj = weighted0;

    for _l in 1..=cfg.max_iter {
        let parts: Vec<(f64, HermitianMatrix)> = fcs
            .iter()
            .zip(&t_prev)
            .zip(weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|((fc, t), &w)| Ok((w, surrogate_matrix(fc, t, scale)?)))
            .collect::<Result<_, WaveformError>>()?;
        let a1 = weighted_surrogate_matrix(&parts)?;
        let ev = min_eigvec(&a1)?;
        let p_new: Vec<Complex64> = ev.vector.iter().map(|z| z * p_total.sqrt()).collect();

        let t_new: Vec<_> = fcs
            .iter()
            .map(|fc| aux_from_vector(&p_new, fc))
            .collect::<Result<_, _>>()?;
        let step = rank1_gram_step(&p_new, &p_prev);
        let gamma: f64 = t_new
            .iter()
            .zip(&t_prev)
            .zip(weights)
            .map(|((t, tp), &w)| w * surrogate_value(t, tp, scale))
            .sum();
        let v_new: Vec<f64> = t_new
            .iter()
            .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
            .collect();
        let obj_new: f64 = v_new.iter().zip(weights).map(|(v, w)| v * w).sum();
        trace.iterations.push(IterationRecord {
            surrogate: gamma,
            vout_per_user: v_new,
            step_frobenius: step,
            degenerate: ev.degenerate,
            t_vars: t_new.iter().map(|t| t.as_slice().to_vec()).collect(),
            identity_residual: None,
            block_rank_ratios: None,
        });
        if obj_new > best_obj {
            best_obj = obj_new;
            best_p = p_new.clone();
        }

        let obj_prev: f64 = t_prev
            .iter()
            .zip(weights)
            .map(|(t, &w)| w * (scale.beta2 * t.t0() - g_exact(t, scale)))
            .sum();
        let stop = match cfg.stop_rule {
            StopRule::Frobenius => step <= cfg.epsilon,
            StopRule::Objective => {
                (obj_new - obj_prev).abs() / obj_new.max(f64::MIN_POSITIVE) <= cfg.epsilon
            }
        };
        t_prev = t_new;
        p_prev = p_new;
        if stop {
            status = AlgStatus::Converged;
            break;
        }
    }

    // s_n = p_n * w_n
    let mut s = vec![Complex64::new(0.0, 0.0); m * n];
    for tone in 0..n {
        for (ant, b) in beams[tone].iter().enumerate() {
            s[tone * m + ant] = best_p[tone] * b;
        }
    }
    let precoder = WaveformPrecoder::new(m, n, s)?;
    let vout_per_user = vout_users(&precoder, ch, beta)?;
    Ok(PrecoderResult {
        precoder,
        vout_per_user,
        trace,
        status,
        p_vectors: Some(vec![best_p]),
        p_bar: None,
        vout_asymptotic: None,
    })
}
