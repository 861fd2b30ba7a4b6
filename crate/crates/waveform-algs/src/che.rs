//! Channel-hardening designs. When spatial inner products concentrate,
//! the asymptotically optimal precoder is a per-tone linear combination
//! of the users' conjugate channels; only the complex weights across
//! frequencies and users remain to be optimized, against the all-ones
//! diagonal masks and large-scale gains. The iterations run at N-by-N
//! scale regardless of the antenna count.

use channel::ChannelRealization;
use cx_linalg::{herm_eig, min_eigvec, psd_sqrt, vnorm, Complex64, CxMat, HermitianMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rectenna_model::{
    aux_from_vector, AsymptoticGain, BetaCoefficients, FreqCouplingMatrices, WaveformPrecoder,
};
use sdp::{
    rank1_preserving_vector, rank_reduce, solve_sdp_with, Constraint, SdpProblem, SdpSolution,
    SdpStatus, Sense, SolverOptions,
};

use crate::config::{AlgorithmConfig, InitStrategy, StopRule};
use crate::error::WaveformError;
use crate::support::{c_bar, g_exact, surrogate_matrix, vector_step, vout_users, SurrogateScale};
use crate::trace::{AlgStatus, IterationRecord, OptimizationTrace, PrecoderResult};

/// Degenerate-tie threshold on per-user minimum eigenvalues.
const TIE_REL_TOL: f64 = 1e-10;

fn hardened_scales(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    e_budget: f64,
) -> Result<Vec<SurrogateScale>, WaveformError> {
    (0..ch.n_users())
        .map(|q| {
            let lambda = ch.lambda(q);
            if !(lambda > 0.0) {
                return Err(WaveformError::NonPositiveGain(lambda));
            }
            Ok(SurrogateScale::hardened(beta, e_budget, lambda))
        })
        .collect()
}

/// Feasible starting weights: uniform power split across users and
/// tones on the normalized sphere sum_q Lambda_q ||p_q||^2 = 1.
fn init_weights(
    init: &InitStrategy,
    ch: &ChannelRealization,
    n: usize,
) -> Result<Vec<Vec<Complex64>>, WaveformError> {
    let k = ch.n_users();
    match init {
        InitStrategy::UpMrt => Ok((0..k)
            .map(|q| {
                let amp = 1.0 / (k as f64 * n as f64 * ch.lambda(q)).sqrt();
                vec![Complex64::new(amp, 0.0); n]
            })
            .collect()),
        InitStrategy::Ass => {
            // all power on the first tone, split across users
            Ok((0..k)
                .map(|q| {
                    let mut p = vec![Complex64::new(0.0, 0.0); n];
                    p[0] = Complex64::new(1.0 / (k as f64 * ch.lambda(q)).sqrt(), 0.0);
                    p
                })
                .collect())
        }
        InitStrategy::Custom(values) => {
            if values.len() != k * n {
                return Err(WaveformError::BadInit {
                    expected: k * n,
                    got: values.len(),
                });
            }
            Ok(values.chunks(n).map(|c| c.to_vec()).collect())
        }
    }
}

/// Assemble the stacked transmit precoder from per-user weights:
/// `s_bar_n = sum_q p_{q,n} conj(h_{q,n})/sqrt(M)` scaled to the budget.
fn assemble_asymptotic(
    ch: &ChannelRealization,
    p_vectors: &[Vec<Complex64>],
    e_budget: f64,
) -> Result<WaveformPrecoder, WaveformError> {
    let (m, n) = (ch.n_antennas, ch.n_tones);
    let mut s_bar = vec![Complex64::new(0.0, 0.0); m * n];
    for tone in 0..n {
        for (q, p_q) in p_vectors.iter().enumerate() {
            let h = ch.spatial(q, tone);
            for (ant, hv) in h.iter().enumerate() {
                s_bar[tone * m + ant] += p_q[tone] * hv.conj() / (m as f64).sqrt();
            }
        }
    }
    let norm = vnorm(&s_bar);
    if norm == 0.0 {
        return Err(WaveformError::ZeroChannel);
    }
    let target = (e_budget / m as f64).sqrt();
    for z in s_bar.iter_mut() {
        *z *= target / norm;
    }
    Ok(WaveformPrecoder::new(m, n, s_bar)?)
}

fn asymptotic_voltages(
    p_vectors: &[Vec<Complex64>],
    fc: &FreqCouplingMatrices,
    beta: &BetaCoefficients,
    ch: &ChannelRealization,
    e_budget: f64,
) -> Result<Vec<f64>, WaveformError> {
    p_vectors
        .iter()
        .enumerate()
        .map(|(q, p)| {
            Ok(rectenna_model::vout_freq(
                p,
                fc,
                beta,
                Some(AsymptoticGain {
                    e: e_budget,
                    lambda: ch.lambda(q),
                }),
            )?)
        })
        .collect()
}

/// Weighted-sum design under channel hardening.
pub fn che_wsum(
    ch: &ChannelRealization,
    weights: &[f64],
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
    rng: &mut ChaCha8Rng,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    let k = ch.n_users();
    crate::support::check_weights(weights, k)?;
    let n = ch.n_tones;
    let e_budget = cfg.budget.radiated(ch.n_antennas);
    let scales = hardened_scales(ch, beta, e_budget)?;
    let fc = FreqCouplingMatrices::asymptotic(n);

    let mut p_prev = init_weights(&cfg.init, ch, n)?;
    let mut t_prev: Vec<_> = p_prev
        .iter()
        .map(|p| aux_from_vector(p, &fc))
        .collect::<Result<_, _>>()?;

    let mut trace = OptimizationTrace::default();
    let v0: Vec<f64> = t_prev
        .iter()
        .zip(&scales)
        .map(|(t, s)| s.beta2 * t.t0() - g_exact(t, *s))
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
    let mut best_p = p_prev.clone();
    let mut best_obj = weighted0;

    for _l in 1..=cfg.max_iter {
        // per-user blocks of the generalized eigensystem; the minimum
        // over blocks decides where the power goes
        let mut lambdas_min = Vec::with_capacity(k);
        let mut vectors = Vec::with_capacity(k);
        for q in 0..k {
            if weights[q] == 0.0 {
                lambdas_min.push(f64::INFINITY);
                vectors.push(vec![Complex64::new(0.0, 0.0); n]);
                continue;
            }
            let a_q = surrogate_matrix(&fc, &t_prev[q], scales[q])?;
            let scaled = HermitianMatrix::from_mat(
                &a_q.as_mat().scale_re(weights[q] / ch.lambda(q)),
            )?;
            let ev = min_eigvec(&scaled)?;
            lambdas_min.push(ev.value);
            vectors.push(ev.vector);
        }
        let min_val = lambdas_min.iter().copied().fold(f64::INFINITY, f64::min);
        let lambda_scale = lambdas_min
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0f64, |a, v| a.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let tied: Vec<usize> = (0..k)
            .filter(|&q| (lambdas_min[q] - min_val) <= TIE_REL_TOL * lambda_scale)
            .collect();
        let degenerate = tied.len() > 1;
        let q_star = if degenerate {
            let pick = tied[rng.gen_range(0..tied.len())];
            trace.notes.push(format!(
                "iteration {}: users {tied:?} tied, power randomly assigned to user {pick}",
                trace.len()
            ));
            pick
        } else {
            tied[0]
        };

        let mut p_new: Vec<Vec<Complex64>> = (0..k)
            .map(|_| vec![Complex64::new(0.0, 0.0); n])
            .collect();
        let b = 1.0 / ch.lambda(q_star).sqrt();
        for (dst, src) in p_new[q_star].iter_mut().zip(&vectors[q_star]) {
            *dst = src * b;
        }

        let t_new: Vec<_> = p_new
            .iter()
            .map(|p| aux_from_vector(p, &fc))
            .collect::<Result<_, _>>()?;
        let stacked_new: Vec<Complex64> = p_new.iter().flatten().copied().collect();
        let stacked_prev: Vec<Complex64> = p_prev.iter().flatten().copied().collect();
        let step = vector_step(&stacked_new, &stacked_prev);
        let gamma: f64 = t_new
            .iter()
            .zip(&t_prev)
            .zip(&scales)
            .zip(weights)
            .map(|(((t, tp), s), &w)| w * crate::support::surrogate_value(t, tp, *s))
            .sum();
        let v_new: Vec<f64> = t_new
            .iter()
            .zip(&scales)
            .map(|(t, s)| s.beta2 * t.t0() - g_exact(t, *s))
            .collect();
        let obj_new: f64 = v_new.iter().zip(weights).map(|(v, w)| v * w).sum();
        trace.iterations.push(IterationRecord {
            surrogate: gamma,
            vout_per_user: v_new,
            step_frobenius: step,
            degenerate,
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
            .zip(&scales)
            .zip(weights)
            .map(|((t, s), &w)| w * (s.beta2 * t.t0() - g_exact(t, *s)))
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

    finish_hardened(ch, beta, e_budget, &fc, best_p, trace, status)
}

/// Shared epilogue: assemble the transmit precoder, audit voltages.
fn finish_hardened(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    e_budget: f64,
    fc: &FreqCouplingMatrices,
    p_vectors: Vec<Vec<Complex64>>,
    trace: OptimizationTrace,
    status: AlgStatus,
) -> Result<PrecoderResult, WaveformError> {
    let asym = asymptotic_voltages(&p_vectors, fc, beta, ch, e_budget)?;
    let precoder = assemble_asymptotic(ch, &p_vectors, e_budget)?;
    let vout_per_user = vout_users(&precoder, ch, beta)?;
    let p_bar: Vec<Complex64> = p_vectors.iter().flatten().copied().collect();
    Ok(PrecoderResult {
        precoder,
        vout_per_user,
        trace,
        status,
        p_vectors: Some(p_vectors),
        p_bar: Some(p_bar),
        vout_asymptotic: Some(asym),
    })
}

/// Shared round of the hardened max-min designs: build surrogate data
/// and solve the relaxed multi-block program.
struct HardenedRound {
    a_mats: Vec<HermitianMatrix>,
    c_bars: Vec<f64>,
    x_blocks: Vec<CxMat>,
    q0: usize,
}

fn hardened_round(
    ch: &ChannelRealization,
    fc: &FreqCouplingMatrices,
    t_prev: &[rectenna_model::AuxVars],
    scales: &[SurrogateScale],
    sdp_tol: f64,
) -> Result<HardenedRound, WaveformError> {
    let k = ch.n_users();
    let n = ch.n_tones;
    let a_mats: Vec<HermitianMatrix> = (0..k)
        .map(|q| surrogate_matrix(fc, &t_prev[q], scales[q]))
        .collect::<Result<_, _>>()?;
    let c_bars: Vec<f64> = t_prev
        .iter()
        .zip(scales)
        .map(|(t, s)| c_bar(t, *s))
        .collect();

    // blocks: K Gram matrices + the common level
    let gamma_block = k;
    let mut constraints = Vec::with_capacity(k + 1);
    for q in 0..k {
        constraints.push(Constraint {
            coeffs: vec![
                (q, a_mats[q].as_mat().clone()),
                (gamma_block, CxMat::identity(1)),
            ],
            sense: Sense::Le,
            rhs: -c_bars[q],
        });
    }
    constraints.push(Constraint {
        coeffs: (0..k)
            .map(|q| (q, CxMat::scaled_identity(n, ch.lambda(q))))
            .collect(),
        sense: Sense::Eq,
        rhs: 1.0,
    });
    let mut dims = vec![n; k];
    dims.push(1);
    let problem = SdpProblem {
        block_dims: dims,
        objective: vec![(gamma_block, CxMat::scaled_identity(1, -1.0))],
        constraints,
    };
    let mut init: Vec<CxMat> = (0..k)
        .map(|q| CxMat::scaled_identity(n, 1.0 / (k as f64 * n as f64 * ch.lambda(q))))
        .collect();
    init.push(CxMat::scaled_identity(1, 1e-3));
    let sol = solve_sdp_with(
        &problem,
        &SolverOptions {
            tol: sdp_tol,
            max_iter: 150,
            initial_primal: Some(init),
        },
    )?;
    if sol.status != SdpStatus::Optimal {
        return Err(WaveformError::InvalidConfig(format!(
            "hardened round solve ended {:?}: {}",
            sol.status,
            sol.notes.join("; ")
        )));
    }
    let x_blocks: Vec<CxMat> = sol.blocks[..k].to_vec();
    let q0 = (0..k)
        .max_by(|&a, &b| {
            let va = a_mats[a].as_mat().trace_product_re(&x_blocks[a]) + c_bars[a];
            let vb = a_mats[b].as_mat().trace_product_re(&x_blocks[b]) + c_bars[b];
            va.total_cmp(&vb).then(b.cmp(&a))
        })
        .unwrap();
    Ok(HardenedRound {
        a_mats,
        c_bars,
        x_blocks,
        q0,
    })
}

/// Hardened max-min with deterministic rank reduction (any K).
pub fn che_max_min_rr(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    let k = ch.n_users();
    let n = ch.n_tones;
    let e_budget = cfg.budget.radiated(ch.n_antennas);
    let scales = hardened_scales(ch, beta, e_budget)?;
    let fc = FreqCouplingMatrices::asymptotic(n);

    let mut p_prev = init_weights(&cfg.init, ch, n)?;
    let mut t_prev: Vec<_> = p_prev
        .iter()
        .map(|p| aux_from_vector(p, &fc))
        .collect::<Result<_, _>>()?;

    let mut trace = OptimizationTrace::default();
    let v0: Vec<f64> = t_prev
        .iter()
        .zip(&scales)
        .map(|(t, s)| s.beta2 * t.t0() - g_exact(t, *s))
        .collect();
    let mut best_min = v0.iter().copied().fold(f64::INFINITY, f64::min);
    trace.iterations.push(IterationRecord {
        surrogate: -best_min,
        vout_per_user: v0,
        step_frobenius: f64::NAN,
        degenerate: false,
        t_vars: t_prev.iter().map(|t| t.as_slice().to_vec()).collect(),
        identity_residual: None,
        block_rank_ratios: None,
    });
    let mut best_p = p_prev.clone();
    let mut status = AlgStatus::MaxIter;

    for _l in 1..=cfg.max_iter {
        let round = hardened_round(ch, &fc, &t_prev, &scales, cfg.sdp_tol)?;
        let q0 = round.q0;

        // fixed-binding reduction problem over the K blocks
        let mut constraints = Vec::with_capacity(k);
        for q in 0..k {
            if q == q0 {
                continue;
            }
            constraints.push(Constraint {
                coeffs: vec![
                    (q, round.a_mats[q].as_mat().clone()),
                    (q0, round.a_mats[q0].as_mat().scale_re(-1.0)),
                ],
                sense: Sense::Le,
                rhs: round.c_bars[q0] - round.c_bars[q],
            });
        }
        constraints.push(Constraint {
            coeffs: (0..k)
                .map(|q| (q, CxMat::scaled_identity(n, ch.lambda(q))))
                .collect(),
            sense: Sense::Eq,
            rhs: 1.0,
        });
        let reduction_problem = SdpProblem {
            block_dims: vec![n; k],
            objective: vec![(q0, round.a_mats[q0].as_mat().clone())],
            constraints,
        };
        let shim = SdpSolution {
            blocks: round.x_blocks.clone(),
            duals: vec![0.0; reduction_problem.constraints.len()],
            objective: reduction_problem.objective_value(&round.x_blocks),
            gap: 0.0,
            status: SdpStatus::Optimal,
            iterations: 0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            notes: Vec::new(),
            iterates: Vec::new(),
        };
        let reduced = rank_reduce(&shim, &reduction_problem)?;
        let rank_ratios: Vec<f64> = reduced
            .blocks
            .iter()
            .map(crate::support::rank_one_ratio)
            .collect::<Result<_, _>>()?;

        let mut p_new = Vec::with_capacity(k);
        for x in &reduced.blocks {
            let eig = herm_eig(&HermitianMatrix::from_mat(x)?)?;
            let top = eig.eigenvalues[n - 1].max(0.0);
            p_new.push(
                eig.eigenvector(n - 1)
                    .into_iter()
                    .map(|z| z * top.sqrt())
                    .collect::<Vec<_>>(),
            );
        }

        let t_new: Vec<_> = p_new
            .iter()
            .map(|p| aux_from_vector(p, &fc))
            .collect::<Result<_, _>>()?;
        let stacked_new: Vec<Complex64> = p_new.iter().flatten().copied().collect();
        let stacked_prev: Vec<Complex64> = p_prev.iter().flatten().copied().collect();
        let step = vector_step(&stacked_new, &stacked_prev);
        let neg_gamma2 = (0..k)
            .map(|q| {
                round.a_mats[q]
                    .as_mat()
                    .trace_product_re(&CxMat::outer(&p_new[q], &p_new[q]))
                    + round.c_bars[q]
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let v_new: Vec<f64> = t_new
            .iter()
            .zip(&scales)
            .map(|(t, s)| s.beta2 * t.t0() - g_exact(t, *s))
            .collect();
        let min_new = v_new.iter().copied().fold(f64::INFINITY, f64::min);
        trace.iterations.push(IterationRecord {
            surrogate: neg_gamma2,
            vout_per_user: v_new,
            step_frobenius: step,
            degenerate: false,
            t_vars: t_new.iter().map(|t| t.as_slice().to_vec()).collect(),
            identity_residual: None,
            block_rank_ratios: Some(rank_ratios),
        });
        for note in &reduced.notes {
            if note.starts_with("rank reduction") {
                trace.notes.push(format!("round {}: {note}", trace.len() - 1));
            }
        }
        if min_new > best_min {
            best_min = min_new;
            best_p = p_new.clone();
        }

        let min_prev = t_prev
            .iter()
            .zip(&scales)
            .map(|(t, s)| s.beta2 * t.t0() - g_exact(t, *s))
            .fold(f64::INFINITY, f64::min);
        let stop = match cfg.stop_rule {
            StopRule::Frobenius => step <= cfg.epsilon,
            StopRule::Objective => {
                (min_new - min_prev).abs() / min_new.max(f64::MIN_POSITIVE) <= cfg.epsilon
            }
        };
        t_prev = t_new;
        p_prev = p_new;
        if stop {
            status = AlgStatus::Converged;
            break;
        }
    }

    finish_hardened(ch, beta, e_budget, &fc, best_p, trace, status)
}

/// Hardened max-min with one randomized rank-1 extraction per round.
/// The minimizers need not converge, so the stop rule tracks the
/// objective, not the iterate.
pub fn che_max_min_randomized(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
    rng: &mut ChaCha8Rng,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    let k = ch.n_users();
    let n = ch.n_tones;
    let e_budget = cfg.budget.radiated(ch.n_antennas);
    let scales = hardened_scales(ch, beta, e_budget)?;
    let fc = FreqCouplingMatrices::asymptotic(n);

    let mut p_prev = init_weights(&cfg.init, ch, n)?;
    let mut t_prev: Vec<_> = p_prev
        .iter()
        .map(|p| aux_from_vector(p, &fc))
        .collect::<Result<_, _>>()?;

    // -gamma2'(0) from the initial point
    let mut neg_gamma_prev = {
        let a0: Vec<HermitianMatrix> = (0..k)
            .map(|q| surrogate_matrix(&fc, &t_prev[q], scales[q]))
            .collect::<Result<_, _>>()?;
        (0..k)
            .map(|q| {
                a0[q]
                    .as_mat()
                    .trace_product_re(&CxMat::outer(&p_prev[q], &p_prev[q]))
                    + c_bar(&t_prev[q], scales[q])
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut trace = OptimizationTrace::default();
    let v0: Vec<f64> = t_prev
        .iter()
        .zip(&scales)
        .map(|(t, s)| s.beta2 * t.t0() - g_exact(t, *s))
        .collect();
    let mut best_min = v0.iter().copied().fold(f64::INFINITY, f64::min);
    trace.iterations.push(IterationRecord {
        surrogate: neg_gamma_prev,
        vout_per_user: v0,
        step_frobenius: f64::NAN,
        degenerate: false,
        t_vars: t_prev.iter().map(|t| t.as_slice().to_vec()).collect(),
        identity_residual: None,
        block_rank_ratios: None,
    });
    let mut best_p = p_prev.clone();
    let mut status = AlgStatus::MaxIter;

    for _l in 1..=cfg.max_iter {
        let round = hardened_round(ch, &fc, &t_prev, &scales, cfg.sdp_tol)?;
        let q0 = round.q0;

        // one randomized rank-1 extraction per user, preserving both
        // trace functionals of the reduction problem exactly
        let mut p_new = Vec::with_capacity(k);
        let mut worst_identity: f64 = 0.0;
        for q in 0..k {
            let b1 = if q == q0 {
                round.a_mats[q0].as_mat().scale_re(-1.0)
            } else {
                round.a_mats[q].as_mat().clone()
            };
            let b2 = CxMat::scaled_identity(n, ch.lambda(q));
            let x_q = &round.x_blocks[q];
            let root = psd_sqrt(&HermitianMatrix::from_mat(x_q)?)?;
            let mid = root.as_mat().matmul(&b1).matmul(root.as_mat());
            let eig = herm_eig(&HermitianMatrix::from_mat(&mid)?)?;
            let u = &eig.eigenvectors;
            let q_mat = u
                .adjoint()
                .matmul(root.as_mat())
                .matmul(&b2)
                .matmul(root.as_mat())
                .matmul(u);
            let v = rank1_preserving_vector(&HermitianMatrix::from_mat(&q_mat)?, rng);
            let p_q = root.as_mat().matvec(&u.matvec(&v));

            // preservation audit of both functionals
            let gram = CxMat::outer(&p_q, &p_q);
            let r1 = (b1.trace_product_re(&gram) - b1.trace_product_re(x_q)).abs()
                / (1.0 + b1.trace_product_re(x_q).abs());
            let r2 = (b2.trace_product_re(&gram) - b2.trace_product_re(x_q)).abs()
                / (1.0 + b2.trace_product_re(x_q).abs());
            worst_identity = worst_identity.max(r1).max(r2);
            p_new.push(p_q);
        }

        let t_new: Vec<_> = p_new
            .iter()
            .map(|p| aux_from_vector(p, &fc))
            .collect::<Result<_, _>>()?;
        let neg_gamma_new = (0..k)
            .map(|q| {
                round.a_mats[q]
                    .as_mat()
                    .trace_product_re(&CxMat::outer(&p_new[q], &p_new[q]))
                    + round.c_bars[q]
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let stacked_new: Vec<Complex64> = p_new.iter().flatten().copied().collect();
        let stacked_prev: Vec<Complex64> = p_prev.iter().flatten().copied().collect();
        let step = vector_step(&stacked_new, &stacked_prev);
        let v_new: Vec<f64> = t_new
            .iter()
            .zip(&scales)
            .map(|(t, s)| s.beta2 * t.t0() - g_exact(t, *s))
            .collect();
        let min_new = v_new.iter().copied().fold(f64::INFINITY, f64::min);
        trace.iterations.push(IterationRecord {
            surrogate: neg_gamma_new,
            vout_per_user: v_new,
            step_frobenius: step,
            degenerate: false,
            t_vars: t_new.iter().map(|t| t.as_slice().to_vec()).collect(),
            identity_residual: Some(worst_identity),
            block_rank_ratios: None,
        });
        if min_new > best_min {
            best_min = min_new;
            best_p = p_new.clone();
        }

        // objective-based stop: the randomized minimizers need not
        // converge to limit points
        let stop = (neg_gamma_new - neg_gamma_prev).abs()
            / neg_gamma_new.abs().max(f64::MIN_POSITIVE)
            <= cfg.epsilon;
        neg_gamma_prev = neg_gamma_new;
        t_prev = t_new;
        p_prev = p_new;
        if stop {
            status = AlgStatus::Converged;
            break;
        }
    }

    finish_hardened(ch, beta, e_budget, &fc, best_p, trace, status)
}
