//! Shared machinery of the successive-approximation loops: surrogate
//! matrices and values, step metrics, matched-beamforming assembly.

use channel::ChannelRealization;
use cx_linalg::{vnorm, vnorm_sq, Complex64, CxMat, HermitianMatrix};
use rectenna_model::{
    build_coupling, vout_quartic, AuxVars, BetaCoefficients, MaskedCoupling, WaveformPrecoder,
};

use crate::error::WaveformError;

/// Effective 2nd/4th-order coefficients of one user's surrogate: the
/// plain Taylor coefficients for exact-channel designs, scaled by the
/// radiated budget and large-scale gain for the hardened designs.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SurrogateScale {
    pub beta2: f64,
    pub beta4: f64,
}

impl SurrogateScale {
    pub fn exact(beta: &BetaCoefficients) -> Self {
        Self {
            beta2: beta.beta2,
            beta4: beta.beta4,
        }
    }

    /// The hardened design sees beta2*E*Lambda^2 and beta4*E^2*Lambda^4.
    pub fn hardened(beta: &BetaCoefficients, e: f64, lambda: f64) -> Self {
        Self {
            beta2: beta.beta2 * e * lambda * lambda,
            beta4: beta.beta4 * e * e * lambda.powi(4),
        }
    }
}

/// Surrogate coefficient matrix of one user at linearization point `t`:
/// `C = -(b2 + 3 b4 t_0)/2 M_0 - 3 b4 sum_k conj(t_k) M_k`, returned as
/// the Hermitian `A = C + C^H`.
pub(crate) fn surrogate_matrix(
    coupling: &impl MaskedCoupling,
    t: &AuxVars,
    scale: SurrogateScale,
) -> Result<HermitianMatrix, WaveformError> {
    let dim = coupling.dim();
    let mut c = CxMat::zeros(dim, dim);
    let t0 = t.t0();
    c.add_assign_scaled(
        coupling.mask(0),
        Complex64::new(-(scale.beta2 + 3.0 * scale.beta4 * t0) / 2.0, 0.0),
    );
    for k in 1..coupling.n_tones() {
        let tk = t.as_slice()[k];
        c.add_assign_scaled(coupling.mask(k), tk.conj() * (-3.0 * scale.beta4));
    }
    let a = c.add(&c.adjoint());
    Ok(HermitianMatrix::from_mat(&a)?)
}

/// Accumulate several users' surrogate matrices with weights.
pub(crate) fn weighted_surrogate_matrix(
    parts: &[(f64, HermitianMatrix)],
) -> Result<HermitianMatrix, WaveformError> {
    let dim = parts[0].1.dim();
    let mut acc = CxMat::zeros(dim, dim);
    for (w, a) in parts {
        acc.add_assign_scaled(a.as_mat(), Complex64::new(*w, 0.0));
    }
    Ok(HermitianMatrix::from_mat(&acc)?)
}

/// Exact concave term `g(t) = t^H A_0 t` with
/// `A_0 = diag(-3 b4/2, -3 b4, ..., -3 b4)`.
pub(crate) fn g_exact(t: &AuxVars, scale: SurrogateScale) -> f64 {
    let t0 = t.t0();
    let cross: f64 = t.as_slice()[1..].iter().map(|z| z.norm_sqr()).sum();
    -1.5 * scale.beta4 * t0 * t0 - 3.0 * scale.beta4 * cross
}

/// First-order surrogate of `g` at `t_prev`:
/// `2 Re{t_prev^H A_0 t} - t_prev^H A_0 t_prev`.
pub(crate) fn g_tilde(t: &AuxVars, t_prev: &AuxVars, scale: SurrogateScale) -> f64 {
    let mut cross_re = t_prev.t0() * t.t0() * 1.5 * scale.beta4;
    for (a, b) in t_prev.as_slice()[1..].iter().zip(&t.as_slice()[1..]) {
        cross_re += 3.0 * scale.beta4 * (a.conj() * b).re;
    }
    -2.0 * cross_re - g_exact(t_prev, scale)
}

/// Per-user surrogate objective contribution `-b2 t_0 + g_tilde`.
pub(crate) fn surrogate_value(t: &AuxVars, t_prev: &AuxVars, scale: SurrogateScale) -> f64 {
    -scale.beta2 * t.t0() + g_tilde(t, t_prev, scale)
}

/// The constant `c_bar = -t_prev^H A_0 t_prev` of the linearization.
pub(crate) fn c_bar(t_prev: &AuxVars, scale: SurrogateScale) -> f64 {
    -g_exact(t_prev, scale)
}

/// Relative Frobenius distance between rank-1 Grams `x x^H` and
/// `y y^H`, computed without forming the matrices.
pub(crate) fn rank1_gram_step(x_new: &[Complex64], x_prev: &[Complex64]) -> f64 {
    let nx = vnorm_sq(x_new);
    let ny = vnorm_sq(x_prev);
    let cross = cx_linalg::cdot(x_new, x_prev).norm_sqr();
    let dist_sq = (nx * nx + ny * ny - 2.0 * cross).max(0.0);
    if nx == 0.0 {
        return if ny == 0.0 { 0.0 } else { f64::INFINITY };
    }
    dist_sq.sqrt() / nx
}

/// Relative Frobenius distance between stacked weight vectors.
pub(crate) fn vector_step(p_new: &[Complex64], p_prev: &[Complex64]) -> f64 {
    let diff_sq: f64 = p_new
        .iter()
        .zip(p_prev)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let norm = vnorm(p_new);
    if norm == 0.0 {
        return if diff_sq == 0.0 { 0.0 } else { f64::INFINITY };
    }
    diff_sq.sqrt() / norm
}

/// Relative Frobenius distance between full Gram matrices.
pub(crate) fn gram_step(x_new: &CxMat, x_prev: &CxMat) -> f64 {
    let norm = x_new.frobenius_norm();
    if norm == 0.0 {
        return if x_prev.frobenius_norm() == 0.0 { 0.0 } else { f64::INFINITY };
    }
    x_new.sub(x_prev).frobenius_norm() / norm
}

/// Assemble the stacked precoder from frequency-domain weights with
/// matched spatial beamforming: `s_n = p_n conj(h_n)/||h_n||`. Zero-gain
/// tones have no serving direction and get zero power.
pub(crate) fn mrt_assemble(
    ch: &ChannelRealization,
    user: usize,
    p: &[Complex64],
) -> Result<WaveformPrecoder, WaveformError> {
    let (m, n) = (ch.n_antennas, ch.n_tones);
    let mut s = vec![Complex64::new(0.0, 0.0); m * n];
    for tone in 0..n {
        let h = ch.spatial(user, tone);
        let norm = vnorm(h);
        if norm == 0.0 {
            continue;
        }
        for (ant, hv) in h.iter().enumerate() {
            s[tone * m + ant] = p[tone] * hv.conj() / norm;
        }
    }
    Ok(WaveformPrecoder::new(m, n, s)?)
}

/// True per-user voltages of a stacked precoder.
pub(crate) fn vout_users(
    s: &WaveformPrecoder,
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
) -> Result<Vec<f64>, WaveformError> {
    (0..ch.n_users())
        .map(|q| {
            let coupling = build_coupling(ch.h(q), ch.n_antennas, ch.n_tones)?;
            Ok(vout_quartic(s, &coupling, beta)?)
        })
        .collect()
}

/// Normalize weights: nonnegative, not all zero.
pub(crate) fn check_weights(weights: &[f64], k: usize) -> Result<(), WaveformError> {
    if weights.len() != k {
        return Err(WaveformError::BadWeights(format!(
            "expected {k} weights, got {}",
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(WaveformError::BadWeights("weights must be nonnegative".into()));
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(WaveformError::BadWeights("weights must not all be zero".into()));
    }
    Ok(())
}

/// Ratio of the second-largest to largest eigenvalue of a PSD block;
/// zero for (numerically) rank-<=1 blocks.
pub(crate) fn rank_one_ratio(x: &CxMat) -> Result<f64, WaveformError> {
    let eig = cx_linalg::herm_eig(&HermitianMatrix::from_mat(x)?)?;
    let n = x.rows();
    if n < 2 {
        return Ok(0.0);
    }
    let top = eig.eigenvalues[n - 1].max(0.0);
    if top == 0.0 {
        return Ok(0.0);
    }
    Ok((eig.eigenvalues[n - 2].max(0.0)) / top)
}
