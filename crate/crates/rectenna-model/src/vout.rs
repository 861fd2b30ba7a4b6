//! DC output voltage of the rectenna in its four representations: the
//! time-average oracle, the stacked quartic form, the frequency-domain
//! compact forms and the channel-hardened asymptotic closed forms.

use cx_linalg::{cdot, Complex64, CxMat};

use crate::coupling::{CouplingMatrices, FreqCouplingMatrices, FreqVariant, MaskedCoupling};
use crate::error::RectennaError;
use crate::types::{AuxVars, BetaCoefficients, WaveformPrecoder};

/// Tolerance on imaginary residues of quantities proven real; anything
/// larger flags numerical corruption instead of being discarded.
pub const IM_RESIDUE_TOL: f64 = 1e-10;

/// Large-scale prefactors of the asymptotic voltage: total radiated
/// energy budget `E = P*M` and the user's linear large-scale gain.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticGain {
    pub e: f64,
    pub lambda: f64,
}

fn quartic_t(x: &[Complex64], coupling: &impl MaskedCoupling) -> Result<Vec<Complex64>, RectennaError> {
    if x.len() != coupling.dim() {
        return Err(RectennaError::DimensionMismatch {
            expected: coupling.dim(),
            got: x.len(),
        });
    }
    Ok((0..coupling.n_tones())
        .map(|k| coupling.mask(k).quadratic_form(x))
        .collect())
}

fn quartic_value(t: &[Complex64], beta: &BetaCoefficients) -> Result<f64, RectennaError> {
    let residue = t[0].im.abs();
    let tolerance = IM_RESIDUE_TOL * (1.0 + t[0].re.abs());
    if residue > tolerance {
        return Err(RectennaError::ImaginaryResidue { residue, tolerance });
    }
    let t0 = t[0].re;
    let cross: f64 = t[1..].iter().map(|tk| tk.norm_sqr()).sum();
    Ok(beta.beta2 * t0 + 1.5 * beta.beta4 * t0 * t0 + 3.0 * beta.beta4 * cross)
}

/// Quartic voltage `beta2 t_0 + 3/2 beta4 |t_0|^2 + 3 beta4 sum |t_k|^2`
/// with `t_k = s^H M_k s`.
pub fn vout_quartic(
    s: &WaveformPrecoder,
    coupling: &CouplingMatrices,
    beta: &BetaCoefficients,
) -> Result<f64, RectennaError> {
    let t = quartic_t(s.entries(), coupling)?;
    quartic_value(&t, beta)
}

/// Same quartic form at N-by-N scale for a frequency-domain weight
/// vector `p`. The asymptotic variant needs the `(E, Lambda)` prefactors
/// and rejects their absence (or their presence elsewhere).
pub fn vout_freq(
    p: &[Complex64],
    fc: &FreqCouplingMatrices,
    beta: &BetaCoefficients,
    prefactors: Option<AsymptoticGain>,
) -> Result<f64, RectennaError> {
    match (fc.variant(), prefactors) {
        (FreqVariant::Asymptotic, None) => Err(RectennaError::MissingAsymptoticPrefactors),
        (FreqVariant::Asymptotic, Some(AsymptoticGain { e, lambda })) => {
            let t = quartic_t(p, fc)?;
            let scaled = BetaCoefficients {
                beta2: beta.beta2 * e * lambda * lambda,
                beta4: beta.beta4 * e * e * lambda.powi(4),
            };
            quartic_value(&t, &scaled)
        }
        (_, Some(_)) => Err(RectennaError::UnexpectedPrefactors),
        (_, None) => {
            let t = quartic_t(p, fc)?;
            quartic_value(&t, beta)
        }
    }
}

/// Closed-form asymptotic voltage under uniform power allocation:
/// `beta2 E L + 3/2 beta4 E^2 L^2 + beta4 E^2 L^2 N(N-1)(2N-1)/(2N^2)`.
pub fn vout_asymptotic_uniform(lambda: f64, e: f64, n: usize, beta: &BetaCoefficients) -> f64 {
    let nf = n as f64;
    let el = e * lambda;
    beta.beta2 * el
        + 1.5 * beta.beta4 * el * el
        + beta.beta4 * el * el * nf * (nf - 1.0) * (2.0 * nf - 1.0) / (2.0 * nf * nf)
}

/// Weighted sum of per-user quartic voltages.
pub fn weighted_sum_vout(
    s: &WaveformPrecoder,
    channels: &[&[Complex64]],
    weights: &[f64],
    beta: &BetaCoefficients,
) -> Result<f64, RectennaError> {
    if channels.len() != weights.len() {
        return Err(RectennaError::DimensionMismatch {
            expected: channels.len(),
            got: weights.len(),
        });
    }
    let mut total = 0.0;
    for (h, &w) in channels.iter().zip(weights) {
        if w < 0.0 {
            return Err(RectennaError::NegativeWeight(w));
        }
        if w == 0.0 {
            continue;
        }
        let coupling = crate::coupling::build_coupling(h, s.antennas(), s.tones())?;
        total += w * vout_quartic(s, &coupling, beta)?;
    }
    Ok(total)
}

/// Trace variables `t_k = Tr{M_k X}` of a Gram matrix against a masked
/// family; `t_0` is checked real and its residue discarded.
pub fn aux_from_gram(x: &CxMat, coupling: &impl MaskedCoupling) -> Result<AuxVars, RectennaError> {
    if x.rows() != coupling.dim() || x.cols() != coupling.dim() {
        return Err(RectennaError::DimensionMismatch {
            expected: coupling.dim(),
            got: x.rows(),
        });
    }
    let t: Vec<Complex64> = (0..coupling.n_tones())
        .map(|k| coupling.mask(k).trace_product(x))
        .collect();
    AuxVars::from_raw(t, IM_RESIDUE_TOL)
}

/// Trace variables of the rank-1 Gram `x x^H`, i.e. `t_k = x^H M_k x`.
pub fn aux_from_vector(
    x: &[Complex64],
    coupling: &impl MaskedCoupling,
) -> Result<AuxVars, RectennaError> {
    let t = quartic_t(x, coupling)?;
    AuxVars::from_raw(t, IM_RESIDUE_TOL)
}

/// Sampling grid of the time-domain oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleSampling {
    pub samples_per_period: usize,
    pub periods: f64,
}

impl OracleSampling {
    /// Exact quadrature for an N-tone quartic: one fundamental period at
    /// 64*N samples clears the 4th-order intermodulation span.
    pub fn default_for(n_tones: usize) -> Self {
        Self {
            samples_per_period: 64 * n_tones.max(1),
            periods: 1.0,
        }
    }
}

/// Brute-force voltage: synthesize the received passband waveform on a
/// canonical uniform tone grid, average `beta2 y^2 + beta4 y^4` over the
/// sampling window.
///
/// The tones sit at `omega_n = (c + n - 1) * 2*pi/T` with the smallest
/// integer `c` satisfying the grid constraint `omega_1 > (N-1)*dw/2`, so
/// every mixing product is a harmonic of the fundamental and integer-
/// period sampling is exact quadrature. The DC value only depends on
/// tone index differences, which makes this canonical grid equivalent to
/// any admissible absolute grid.
pub fn vout_time_oracle(
    s: &WaveformPrecoder,
    h: &[Complex64],
    beta: &BetaCoefficients,
    sampling: &OracleSampling,
) -> Result<f64, RectennaError> {
    let (m, n) = (s.antennas(), s.tones());
    if h.len() != m * n {
        return Err(RectennaError::BadLayout { len: h.len(), m, n });
    }
    let periods_rounded = sampling.periods.round();
    if sampling.periods <= 0.0 || (sampling.periods - periods_rounded).abs() > 1e-9 {
        return Err(RectennaError::NonIntegerPeriod(sampling.periods));
    }
    let periods = periods_rounded as usize;

    // per-tone received complex amplitude h_n^T s_n
    let amplitudes: Vec<Complex64> = (0..n)
        .map(|t| {
            let hn: Vec<Complex64> = h[t * m..(t + 1) * m].iter().map(|z| z.conj()).collect();
            cdot(&hn, s.tone_block(t))
        })
        .collect();

    let c_base = (n - 1) / 2 + 1; // smallest integer with c > (N-1)/2
    let max_harmonic = 4 * (c_base + n - 1);
    if sampling.samples_per_period <= max_harmonic {
        return Err(RectennaError::AliasedSampling {
            samples: sampling.samples_per_period,
            max_harmonic,
        });
    }

    let total = sampling.samples_per_period * periods;
    let mut acc = 0.0;
    for i in 0..total {
        let t = i as f64 / sampling.samples_per_period as f64;
        let mut z = Complex64::new(0.0, 0.0);
        for (tone, a) in amplitudes.iter().enumerate() {
            let phase = 2.0 * std::f64::consts::PI * ((c_base + tone) as f64) * t;
            z += a * Complex64::from_polar(1.0, phase);
        }
        let y = std::f64::consts::SQRT_2 * z.re;
        let y2 = y * y;
        acc += beta.beta2 * y2 + beta.beta4 * y2 * y2;
    }
    Ok(acc / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::build_coupling;
    use crate::types::{beta_coefficients, RectifierParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn beta() -> BetaCoefficients {
        beta_coefficients(&RectifierParams::default()).unwrap()
    }

    #[test]
    fn zero_precoder_gives_zero() {
        let beta = beta();
        let h = [c(1.0, 0.5), c(-0.2, 0.3)];
        let s = WaveformPrecoder::zeros(1, 2);
        let coupling = build_coupling(&h, 1, 2).unwrap();
        assert_eq!(vout_quartic(&s, &coupling, &beta).unwrap(), 0.0);
        let sampling = OracleSampling::default_for(2);
        assert_eq!(vout_time_oracle(&s, &h, &beta, &sampling).unwrap(), 0.0);
    }

    #[test]
    fn single_tone_closed_form() {
        let beta = beta();
        let p: f64 = 2.5;
        let s = WaveformPrecoder::new(1, 1, vec![c(p.sqrt(), 0.0)]).unwrap();
        let coupling = build_coupling(&[c(1.0, 0.0)], 1, 1).unwrap();
        let v = vout_quartic(&s, &coupling, &beta).unwrap();
        let expect = beta.beta2 * p + 1.5 * beta.beta4 * p * p;
        assert!((v - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn single_tone_time_average_moments() {
        // amplitude a with unit channel: averages of 2a^2 cos^2 and 4a^4 cos^4
        let beta = beta();
        let a = 0.7;
        let s = WaveformPrecoder::new(1, 1, vec![c(a, 0.0)]).unwrap();
        let sampling = OracleSampling::default_for(1);
        let v = vout_time_oracle(&s, &[c(1.0, 0.0)], &beta, &sampling).unwrap();
        let expect = beta.beta2 * a * a + 1.5 * beta.beta4 * a.powi(4);
        assert!((v - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn oracle_rejects_fractional_periods() {
        let beta = beta();
        let s = WaveformPrecoder::zeros(1, 2);
        let sampling = OracleSampling {
            samples_per_period: 128,
            periods: 1.5,
        };
        assert!(matches!(
            vout_time_oracle(&s, &[c(1.0, 0.0), c(1.0, 0.0)], &beta, &sampling),
            Err(RectennaError::NonIntegerPeriod(_))
        ));
    }

    #[test]
    fn freq_norm_single_tone() {
        let beta = beta();
        let g = 1.3;
        let p_budget: f64 = 2.0;
        let fc = FreqCouplingMatrices::from_h_norm(&[g]);
        let v = vout_freq(&[c(p_budget.sqrt(), 0.0)], &fc, &beta, None).unwrap();
        let expect = beta.beta2 * p_budget * g * g + 1.5 * beta.beta4 * (p_budget * g * g).powi(2);
        assert!((v - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn asymptotic_uniform_matches_freq_form() {
        let beta = beta();
        let (lambda, e) = (2.0e-6, 4.0);
        for n in [1usize, 2, 3, 8] {
            let fc = FreqCouplingMatrices::asymptotic(n);
            let p: Vec<Complex64> = vec![c(1.0 / (n as f64 * lambda).sqrt(), 0.0); n];
            let v = vout_freq(&p, &fc, &beta, Some(AsymptoticGain { e, lambda })).unwrap();
            let closed = vout_asymptotic_uniform(lambda, e, n, &beta);
            assert!(
                (v - closed).abs() <= 1e-12 * closed.max(1e-300),
                "n={n}: {v} vs {closed}"
            );
        }
    }

    #[test]
    fn asymptotic_uniform_small_n_arithmetic() {
        let beta = beta();
        let (lambda, e) = (1.5, 2.0);
        let el = e * lambda;
        let v1 = vout_asymptotic_uniform(lambda, e, 1, &beta);
        assert!((v1 - (beta.beta2 * el + 1.5 * beta.beta4 * el * el)).abs() < 1e-12);
        let v2 = vout_asymptotic_uniform(lambda, e, 2, &beta);
        let expect2 = beta.beta2 * el + 1.5 * beta.beta4 * el * el + 0.75 * beta.beta4 * el * el;
        assert!((v2 - expect2).abs() < 1e-12 * expect2);
    }

    #[test]
    fn asymptotic_third_term_approaches_linear_growth() {
        // third term divided by N tends to beta4 E^2 L^2; the exact ratio
        // is (N-1)(2N-1)/(2N^2) = 0.9766845703125 at N=64
        let beta = beta();
        let (lambda, e) = (1.0f64, 1.0f64);
        let limit = beta.beta4 * (e * lambda).powi(2);
        let base = beta.beta2 * e * lambda + 1.5 * beta.beta4 * (e * lambda).powi(2);
        let ratio_at = |n: usize| {
            let third = vout_asymptotic_uniform(lambda, e, n, &beta) - base;
            third / n as f64 / limit
        };
        assert!((ratio_at(64) - 0.9766845703125).abs() < 1e-12);
        // converges toward 1 from below
        assert!((ratio_at(256) - 1.0).abs() < (ratio_at(64) - 1.0).abs());
        assert!((ratio_at(4096) - 1.0).abs() < 4e-4);
    }

    #[test]
    fn missing_prefactors_rejected() {
        let beta = beta();
        let fc = FreqCouplingMatrices::asymptotic(2);
        assert!(matches!(
            vout_freq(&[c(1.0, 0.0), c(1.0, 0.0)], &fc, &beta, None),
            Err(RectennaError::MissingAsymptoticPrefactors)
        ));
        let fc2 = FreqCouplingMatrices::from_h_norm(&[1.0, 1.0]);
        assert!(matches!(
            vout_freq(
                &[c(1.0, 0.0), c(1.0, 0.0)],
                &fc2,
                &beta,
                Some(AsymptoticGain { e: 1.0, lambda: 1.0 })
            ),
            Err(RectennaError::UnexpectedPrefactors)
        ));
    }

    #[test]
    fn weighted_sum_is_additive() {
        let beta = beta();
        let h1: Vec<Complex64> = vec![c(1.0, 0.2), c(0.3, -0.4), c(0.5, 0.6), c(-0.7, 0.1)];
        let h2: Vec<Complex64> = vec![c(0.4, -0.9), c(1.1, 0.0), c(-0.2, 0.2), c(0.8, 0.5)];
        let s = WaveformPrecoder::new(2, 2, vec![c(0.5, 0.1), c(-0.3, 0.2), c(0.7, 0.0), c(0.1, -0.6)])
            .unwrap();
        let (w1, w2) = (0.4, 1.7);
        let total = weighted_sum_vout(&s, &[&h1, &h2], &[w1, w2], &beta).unwrap();
        let c1 = build_coupling(&h1, 2, 2).unwrap();
        let c2 = build_coupling(&h2, 2, 2).unwrap();
        let expect =
            w1 * vout_quartic(&s, &c1, &beta).unwrap() + w2 * vout_quartic(&s, &c2, &beta).unwrap();
        assert!((total - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
    }

    #[test]
    fn weighted_sum_zero_weights() {
        let beta = beta();
        let h1 = [c(1.0, 0.0), c(0.5, 0.5)];
        let s = WaveformPrecoder::new(1, 2, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(
            weighted_sum_vout(&s, &[&h1], &[0.0], &beta).unwrap(),
            0.0
        );
        assert!(weighted_sum_vout(&s, &[&h1], &[-0.1], &beta).is_err());
    }

    #[test]
    fn aux_from_gram_matches_vector_form() {
        let h: Vec<Complex64> = (0..6).map(|i| c((i as f64).cos(), (i as f64).sin())).collect();
        let coupling = build_coupling(&h, 2, 3).unwrap();
        let x: Vec<Complex64> = (0..6).map(|i| c(0.1 * i as f64, -0.2 * i as f64)).collect();
        let gram = CxMat::outer(&x, &x);
        let a = aux_from_gram(&gram, &coupling).unwrap();
        let b = aux_from_vector(&x, &coupling).unwrap();
        for (ta, tb) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((ta - tb).norm() < 1e-10 * (1.0 + tb.norm()));
        }
    }

    #[test]
    fn aux_zero_gram() {
        let coupling = build_coupling(&[c(1.0, 0.0), c(2.0, 0.0)], 1, 2).unwrap();
        let aux = aux_from_gram(&CxMat::zeros(2, 2), &coupling).unwrap();
        assert_eq!(aux.t0(), 0.0);
        assert_eq!(aux.as_slice()[1], c(0.0, 0.0));
    }

    #[test]
    fn aux_brute_force_block_diagonal_sum() {
        // t_k as an explicit double sum over the k-th block diagonal
        let h: Vec<Complex64> = (0..6)
            .map(|i| c(0.3 + 0.1 * i as f64, 0.05 * i as f64 - 0.2))
            .collect();
        let (m, n) = (2usize, 3usize);
        let coupling = build_coupling(&h, m, n).unwrap();
        let b = CxMat::from_fn(6, 6, |i, j| c(0.1 * (i + j) as f64, 0.02 * (i as f64 - j as f64)));
        let x = b.matmul(&b.adjoint()); // PSD
        let aux = aux_from_gram(&x, &coupling).unwrap();
        for k in 0..n {
            let mut expect = c(0.0, 0.0);
            for t in 0..(n - k) {
                for i in 0..m {
                    for j in 0..m {
                        let row = t * m + i;
                        let col = (t + k) * m + j;
                        expect += h[row].conj() * h[col] * x[(col, row)];
                    }
                }
            }
            let got = aux.as_slice()[k];
            assert!((got - expect).norm() < 1e-9 * (1.0 + expect.norm()), "k={k}");
        }
    }
}
