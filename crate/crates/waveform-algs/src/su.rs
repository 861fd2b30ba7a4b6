//! Single-user design. The optimal spatial beamforming is matched
//! (conjugate channel per tone), so the iteration only optimizes the
//! frequency-domain power allocation: each round builds the surrogate
//! matrix over the per-tone channel norms, takes the minimum-eigenvalue
//! direction at full power, and refreshes the trace variables.

use channel::ChannelRealization;
use cx_linalg::{min_eigvec, Complex64};
use rectenna_model::{
    aux_from_vector, vout_freq, BetaCoefficients, FreqCouplingMatrices,
};

use crate::config::{AlgorithmConfig, InitStrategy, StopRule};
use crate::error::WaveformError;
use crate::support::{
    g_exact, mrt_assemble, rank1_gram_step, surrogate_matrix, surrogate_value, vout_users,
    SurrogateScale,
};
use crate::trace::{AlgStatus, IterationRecord, OptimizationTrace, PrecoderResult};

/// Frequency-domain starting point under a total power `p_total`.
pub(crate) fn init_freq_weights(
    init: &InitStrategy,
    gains: &[f64],
    p_total: f64,
) -> Result<Vec<Complex64>, WaveformError> {
    let n = gains.len();
    let live: Vec<usize> = (0..n).filter(|&i| gains[i] > 0.0).collect();
    if live.is_empty() {
        return Err(WaveformError::ZeroChannel);
    }
    match init {
        InitStrategy::UpMrt => {
            let amp = (p_total / live.len() as f64).sqrt();
            let mut p = vec![Complex64::new(0.0, 0.0); n];
            for &i in &live {
                p[i] = Complex64::new(amp, 0.0);
            }
            Ok(p)
        }
        InitStrategy::Ass => {
            let best = live
                .iter()
                .copied()
                .max_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(b.cmp(&a)))
                .unwrap();
            let mut p = vec![Complex64::new(0.0, 0.0); n];
            p[best] = Complex64::new(p_total.sqrt(), 0.0);
            Ok(p)
        }
        InitStrategy::Custom(values) => {
            if values.len() != n {
                return Err(WaveformError::BadInit {
                    expected: n,
                    got: values.len(),
                });
            }
            Ok(values.clone())
        }
    }
}

/// Single-user voltage maximization.
pub fn su_wpt(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    if ch.n_users() != 1 {
        return Err(WaveformError::WrongUserCount {
            expected: "1".into(),
            got: ch.n_users(),
        });
    }
    let _n = ch.n_tones;
    let p_total = cfg.budget.power(ch.n_antennas);
    let gains = ch.tone_norms(0);
    let fc = FreqCouplingMatrices::from_h_norm(&gains);
    let scale = SurrogateScale::exact(beta);

    let p0 = init_freq_weights(&cfg.init, &gains, p_total)?;
    let mut t_prev = aux_from_vector(&p0, &fc)?;
    let mut p_prev = p0.clone();
    let mut trace = OptimizationTrace::default();
    let v0 = vout_freq(&p0, &fc, beta, None)?;
    trace.iterations.push(IterationRecord {
        surrogate: -v0,
        vout_per_user: vec![v0],
        step_frobenius: f64::NAN,
        degenerate: false,
        t_vars: vec![t_prev.as_slice().to_vec()],
        identity_residual: None,
        block_rank_ratios: None,
    });

    let mut status = AlgStatus::MaxIter;
    let mut best_p = p0;
    let mut best_v = v0;

    for _l in 1..=cfg.max_iter {
        let a_mat = surrogate_matrix(&fc, &t_prev, scale)?;
        let ev = min_eigvec(&a_mat)?;
        let p_new: Vec<Complex64> = ev.vector.iter().map(|z| z * p_total.sqrt()).collect();
        let t_new = aux_from_vector(&p_new, &fc)?;

        let step = rank1_gram_step(&p_new, &p_prev);
        let gamma = surrogate_value(&t_new, &t_prev, scale);
        let v_new = vout_freq(&p_new, &fc, beta, None)?;
        trace.iterations.push(IterationRecord {
            surrogate: gamma,
            vout_per_user: vec![v_new],
            step_frobenius: step,
            degenerate: ev.degenerate,
            t_vars: vec![t_new.as_slice().to_vec()],
            identity_residual: None,
            block_rank_ratios: None,
        });
        if v_new > best_v {
            best_v = v_new;
            best_p = p_new.clone();
        }

        let v_prev = -g_exact(&t_prev, scale) + scale.beta2 * t_prev.t0();
        let stop = match cfg.stop_rule {
            StopRule::Frobenius => step <= cfg.epsilon,
            StopRule::Objective => (v_new - v_prev).abs() / v_new.max(f64::MIN_POSITIVE) <= cfg.epsilon,
        };
        t_prev = t_new;
        p_prev = p_new;
        if stop {
            status = AlgStatus::Converged;
            break;
        }
    }

    let precoder = mrt_assemble(ch, 0, &best_p)?;
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

#[cfg(test)]
mod tests {
    use super::*;
    use channel::{gen_hardened, HardeningMode};
    use crate::config::Budget;
    use rectenna_model::{beta_coefficients, RectifierParams};

    fn beta() -> BetaCoefficients {
        beta_coefficients(&RectifierParams::default()).unwrap()
    }

    #[test]
    fn single_tone_closed_form() {
        // N=1: one eigen-step, all power on the only tone
        let ch = gen_hardened(&[1.0], 3, 1, HardeningMode::Gaussian, 7).unwrap();
        let beta = beta();
        let p_total = 2.0;
        let cfg = AlgorithmConfig {
            budget: Budget::TotalPower(p_total),
            ..Default::default()
        };
        let res = su_wpt(&ch, &beta, &cfg).unwrap();
        let g2: f64 = ch.h(0).iter().map(|z| z.norm_sqr()).sum();
        let expect = beta.beta2 * p_total * g2 + 1.5 * beta.beta4 * (p_total * g2).powi(2);
        assert!((res.vout_per_user[0] - expect).abs() <= 1e-9 * expect);
        assert!((res.precoder.norm_sq() - p_total).abs() <= 1e-9 * p_total);
        assert_eq!(res.status, AlgStatus::Converged);
    }

    #[test]
    fn flat_channel_matches_simplex_grid_argmax() {
        // equal tone gains, N=3: a dense grid over the power simplex
        // puts the optimum at (2/7, 3/7, 2/7) -- center-heavy, because
        // the middle tone joins both adjacent intermodulation pairs
        let n = 3;
        let g = 0.8;
        let ch = synthetic_single_user(1, n, vec![Complex64::new(g, 0.0); n]);
        let beta = beta();
        let p_total = 1.5;
        let cfg = AlgorithmConfig {
            budget: Budget::TotalPower(p_total),
            epsilon: 1e-9,
            max_iter: 500,
            ..Default::default()
        };
        let res = su_wpt(&ch, &beta, &cfg).unwrap();
        let p = res.p_vectors.as_ref().unwrap()[0].clone();
        let shares: Vec<f64> = p.iter().map(|z| z.norm_sqr() / p_total).collect();

        // independent oracle: dense simplex grid over power splits with
        // real amplitudes (phases are immaterial for flat gains)
        let fc = rectenna_model::FreqCouplingMatrices::from_h_norm(&[g; 3]);
        let mut best = (f64::NEG_INFINITY, [0.0f64; 3]);
        let steps = 300usize;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let a = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    ((steps - i - j) as f64 / steps as f64).max(0.0),
                ];
                let probe: Vec<Complex64> = a
                    .iter()
                    .map(|&x| Complex64::new((x * p_total).sqrt(), 0.0))
                    .collect();
                let v = vout_freq(&probe, &fc, &beta, None).unwrap();
                if v > best.0 {
                    best = (v, a);
                }
            }
        }
        // grid argmax sits at the analytic optimum (2/7, 3/7, 2/7)
        assert!((best.1[0] - 2.0 / 7.0).abs() < 1e-2, "grid argmax {:?}", best.1);
        assert!((best.1[1] - 3.0 / 7.0).abs() < 1e-2);
        // the iterative design matches it to much tighter accuracy
        assert!((shares[0] - 2.0 / 7.0).abs() < 1e-6, "shares {shares:?}");
        assert!((shares[1] - 3.0 / 7.0).abs() < 1e-6);
        assert!((shares[2] - 2.0 / 7.0).abs() < 1e-6);
        assert!(res.vout_per_user[0] >= best.0 - 1e-9 * best.0);
    }

    #[test]
    fn degenerate_zero_gain_tone_gets_no_power() {
        let mut h = vec![Complex64::new(1.0, 0.0); 3];
        h[1] = Complex64::new(0.0, 0.0);
        let ch = synthetic_single_user(1, 3, h);
        let beta = beta();
        let cfg = AlgorithmConfig {
            budget: Budget::TotalPower(1.0),
            epsilon: 1e-8,
            ..Default::default()
        };
        let res = su_wpt(&ch, &beta, &cfg).unwrap();
        assert!(res.precoder.tone_block(1)[0].norm() < 1e-9);
        assert!((res.precoder.norm_sq() - 1.0).abs() < 1e-9);
    }

    pub(crate) fn synthetic_single_user(
        m: usize,
        n: usize,
        h: Vec<Complex64>,
    ) -> ChannelRealization {
        ChannelRealization {
            n_antennas: m,
            n_tones: n,
            users: vec![channel::UserChannel { h, lambda: 1.0 }],
            seed: 0,
            config_hash: 0,
        }
    }
}
