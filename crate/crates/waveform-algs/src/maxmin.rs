//! Max-min voltage designs over the stacked precoder. Each round
//! linearizes the concave voltage term per user, solves the resulting
//! relaxed program by the interior-point method, and either restores a
//! rank-1 iterate immediately through deterministic rank reduction (up
//! to three users) or randomizes once after convergence (any number of
//! users).

use channel::ChannelRealization;
use cx_linalg::{herm_eig, CxMat, HermitianMatrix};
use rand_chacha::ChaCha8Rng;
use rectenna_model::{
    aux_from_gram, aux_from_vector, build_coupling, BetaCoefficients, CouplingMatrices,
    WaveformPrecoder,
};
use sdp::{
    randomize_gaussian_rank1, rank_reduce, solve_sdp_with, Constraint, SdpProblem, SdpSolution,
    SdpStatus, Sense, SolverOptions,
};

use crate::config::{AlgorithmConfig, StopRule};
use crate::error::WaveformError;
use crate::support::{
    c_bar, g_exact, gram_step, surrogate_matrix, vout_users, SurrogateScale,
};
use crate::trace::{AlgStatus, IterationRecord, OptimizationTrace, PrecoderResult};
use crate::wsum::init_stacked;

struct SdrOutcome {
    x: CxMat,
    duals: Vec<f64>,
    objective: f64,
    notes: Vec<String>,
}

/// Solve the per-round relaxed program: maximize the worst linearized
/// voltage under the trace bound. Blocks: the Gram matrix and a scalar
/// for the common level (nonnegative, which holds at every optimum
/// because the previous iterate is feasible with nonnegative voltage).
fn solve_round_sdr(
    a_mats: &[HermitianMatrix],
    c_bars: &[f64],
    p_total: f64,
    dim: usize,
    sdp_tol: f64,
) -> Result<(SdpProblem, SdrOutcome), WaveformError> {
    let k = a_mats.len();
    let gamma_block = 1;
    let mut constraints = Vec::with_capacity(k + 1);
    for q in 0..k {
        constraints.push(Constraint {
            coeffs: vec![
                (0, a_mats[q].as_mat().clone()),
                (gamma_block, CxMat::identity(1)),
            ],
            sense: Sense::Le,
            rhs: -c_bars[q],
        });
    }
    constraints.push(Constraint {
        coeffs: vec![(0, CxMat::identity(dim))],
        sense: Sense::Le,
        rhs: p_total,
    });
    let problem = SdpProblem {
        block_dims: vec![dim, 1],
        objective: vec![(gamma_block, CxMat::scaled_identity(1, -1.0))],
        constraints,
    };
    let sol = solve_sdp_with(
        &problem,
        &SolverOptions {
            tol: sdp_tol,
            max_iter: 150,
            initial_primal: Some(vec![
                CxMat::scaled_identity(dim, p_total / (2.0 * dim as f64)),
                CxMat::scaled_identity(1, 1e-3),
            ]),
        },
    )?;
    if sol.status != SdpStatus::Optimal {
        return Err(WaveformError::InvalidConfig(format!(
            "relaxed round solve ended {:?}: {}",
            sol.status,
            sol.notes.join("; ")
        )));
    }
    let outcome = SdrOutcome {
        x: sol.blocks[0].clone(),
        duals: sol.duals.clone(),
        objective: sol.objective,
        notes: sol.notes,
    };
    Ok((problem, outcome))
}

/// Rank-1 factor of a PSD matrix: sqrt(lambda_max) times the dominant
/// eigenvector, with the phase canonical.
fn rank1_factor(x: &CxMat) -> Result<Vec<cx_linalg::Complex64>, WaveformError> {
    let eig = herm_eig(&HermitianMatrix::from_mat(x)?)?;
    let n = x.rows();
    let lambda = eig.eigenvalues[n - 1].max(0.0);
    Ok(eig
        .eigenvector(n - 1)
        .into_iter()
        .map(|z| z * lambda.sqrt())
        .collect())
}

/// Max-min design with embedded rank reduction (up to three users).
pub fn max_min_rr(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    let k = ch.n_users();
    if k > 3 {
        return Err(WaveformError::TooManyUsersForRr(k));
    }
    let (m, n) = (ch.n_antennas, ch.n_tones);
    let dim = m * n;
    let p_total = cfg.budget.power(m);
    let scale = SurrogateScale::exact(beta);
    let couplings: Vec<CouplingMatrices> = (0..k)
        .map(|q| build_coupling(ch.h(q), m, n))
        .collect::<Result<_, _>>()?;

    let equal = vec![1.0; k];
    let s0 = init_stacked(&cfg.init, ch, &equal, p_total)?;
    let mut t_prev: Vec<_> = couplings
        .iter()
        .map(|c| aux_from_vector(&s0, c))
        .collect::<Result<_, _>>()?;
    let mut x_prev = CxMat::outer(&s0, &s0);
    let mut s_best = s0.clone();

    let mut trace = OptimizationTrace::default();
    let v0: Vec<f64> = t_prev
        .iter()
        .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
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

    let mut status = AlgStatus::MaxIter;

    for _l in 1..=cfg.max_iter {
        let a_mats: Vec<HermitianMatrix> = couplings
            .iter()
            .zip(&t_prev)
            .map(|(c, t)| surrogate_matrix(c, t, scale))
            .collect::<Result<_, _>>()?;
        let c_bars: Vec<f64> = t_prev.iter().map(|t| c_bar(t, scale)).collect();

        let (_, sdr) = solve_round_sdr(&a_mats, &c_bars, p_total, dim, cfg.sdp_tol)?;

        // binding user: the row that attains the worst linearized value
        let q0 = (0..k)
            .max_by(|&a, &b| {
                let va = a_mats[a].as_mat().trace_product_re(&sdr.x) + c_bars[a];
                let vb = a_mats[b].as_mat().trace_product_re(&sdr.x) + c_bars[b];
                va.total_cmp(&vb).then(b.cmp(&a))
            })
            .unwrap();

        // fixed-binding reduction: minimize user q0's row subject to the
        // others staying no worse, then reduce rank
        let mut constraints = Vec::with_capacity(k);
        for q in 0..k {
            if q == q0 {
                continue;
            }
            constraints.push(Constraint {
                coeffs: vec![(0, a_mats[q].as_mat().sub(a_mats[q0].as_mat()))],
                sense: Sense::Le,
                rhs: c_bars[q0] - c_bars[q],
            });
        }
        constraints.push(Constraint {
            coeffs: vec![(0, CxMat::identity(dim))],
            sense: Sense::Le,
            rhs: p_total,
        });
        let reduction_problem = SdpProblem {
            block_dims: vec![dim],
            objective: vec![(0, a_mats[q0].as_mat().clone())],
            constraints,
        };
        let shim = SdpSolution {
            blocks: vec![sdr.x.clone()],
            duals: vec![0.0; reduction_problem.constraints.len()],
            objective: reduction_problem.objective_value(std::slice::from_ref(&sdr.x)),
            gap: 0.0,
            status: SdpStatus::Optimal,
            iterations: 0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            notes: sdr.notes.clone(),
            iterates: Vec::new(),
        };
        let reduced = rank_reduce(&shim, &reduction_problem)?;
        let x_r1 = reduced.blocks[0].clone();
        let rank_ratio = crate::support::rank_one_ratio(&x_r1)?;
        let s_new = rank1_factor(&x_r1)?;

        let t_new: Vec<_> = couplings
            .iter()
            .map(|c| aux_from_vector(&s_new, c))
            .collect::<Result<_, _>>()?;
        let x_new = CxMat::outer(&s_new, &s_new);
        let step = gram_step(&x_new, &x_prev);

        // surrogate: the worst linearized voltage of the new iterate
        let neg_gamma2 = (0..k)
            .map(|q| a_mats[q].as_mat().trace_product_re(&x_new) + c_bars[q])
            .fold(f64::NEG_INFINITY, f64::max);
        let v_new: Vec<f64> = t_new
            .iter()
            .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
            .collect();
        let min_new = v_new.iter().copied().fold(f64::INFINITY, f64::min);
        trace.iterations.push(IterationRecord {
            surrogate: neg_gamma2,
            vout_per_user: v_new,
            step_frobenius: step,
            degenerate: false,
            t_vars: t_new.iter().map(|t| t.as_slice().to_vec()).collect(),
            identity_residual: None,
            block_rank_ratios: Some(vec![rank_ratio]),
        });
        for note in &reduced.notes {
            if note.starts_with("rank reduction") {
                trace.notes.push(format!("round {}: {note}", trace.len() - 1));
            }
        }
        if min_new > best_min {
            best_min = min_new;
            s_best = s_new.clone();
        }

        let min_prev = t_prev
            .iter()
            .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
            .fold(f64::INFINITY, f64::min);
        let stop = match cfg.stop_rule {
            StopRule::Frobenius => step <= cfg.epsilon,
            StopRule::Objective => {
                (min_new - min_prev).abs() / min_new.max(f64::MIN_POSITIVE) <= cfg.epsilon
            }
        };
        t_prev = t_new;
        x_prev = x_new;
        if stop {
            status = AlgStatus::Converged;
            break;
        }
    }

    // every voltage term grows with amplitude scale, so the optimum sits
    // on the budget boundary; rescale away the solver's residual slack
    scale_to_budget(&mut s_best, p_total);
    let precoder = WaveformPrecoder::new(m, n, s_best)?;
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

fn scale_to_budget(s: &mut [cx_linalg::Complex64], p_total: f64) {
    let norm_sq: f64 = s.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq > 0.0 {
        let factor = (p_total / norm_sq).sqrt();
        for z in s.iter_mut() {
            *z *= factor;
        }
    }
}

/// Max-min design for any number of users: iterate the relaxed program
/// to convergence on the high-rank iterate, then pick the best of T
/// randomized rank-1 candidates.
pub fn max_min_rand(
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    cfg: &AlgorithmConfig,
    rng: &mut ChaCha8Rng,
) -> Result<PrecoderResult, WaveformError> {
    cfg.validate()?;
    let k = ch.n_users();
    let (m, n) = (ch.n_antennas, ch.n_tones);
    let dim = m * n;
    let p_total = cfg.budget.power(m);
    let scale = SurrogateScale::exact(beta);
    let couplings: Vec<CouplingMatrices> = (0..k)
        .map(|q| build_coupling(ch.h(q), m, n))
        .collect::<Result<_, _>>()?;

    let equal = vec![1.0; k];
    let s0 = init_stacked(&cfg.init, ch, &equal, p_total)?;
    let mut x_prev = CxMat::outer(&s0, &s0);
    let mut t_prev: Vec<_> = couplings
        .iter()
        .map(|c| aux_from_vector(&s0, c))
        .collect::<Result<_, _>>()?;

    let mut trace = OptimizationTrace::default();
    let v0: Vec<f64> = t_prev
        .iter()
        .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
        .collect();
    trace.iterations.push(IterationRecord {
        surrogate: -v0.iter().copied().fold(f64::INFINITY, f64::min),
        vout_per_user: v0,
        step_frobenius: f64::NAN,
        degenerate: false,
        t_vars: t_prev.iter().map(|t| t.as_slice().to_vec()).collect(),
        identity_residual: None,
        block_rank_ratios: None,
    });

    let mut status = AlgStatus::MaxIter;
    let mut x_converged = x_prev.clone();

    for _l in 1..=cfg.max_iter {
        let a_mats: Vec<HermitianMatrix> = couplings
            .iter()
            .zip(&t_prev)
            .map(|(c, t)| surrogate_matrix(c, t, scale))
            .collect::<Result<_, _>>()?;
        let c_bars: Vec<f64> = t_prev.iter().map(|t| c_bar(t, scale)).collect();
        let (_, sdr) = solve_round_sdr(&a_mats, &c_bars, p_total, dim, cfg.sdp_tol)?;

        let t_new: Vec<_> = couplings
            .iter()
            .map(|c| aux_from_gram(&sdr.x, c))
            .collect::<Result<_, _>>()?;
        let step = gram_step(&sdr.x, &x_prev);
        let v_new: Vec<f64> = t_new
            .iter()
            .map(|t| scale.beta2 * t.t0() - g_exact(t, scale))
            .collect();
        trace.iterations.push(IterationRecord {
            surrogate: sdr.objective,
            vout_per_user: v_new,
            step_frobenius: step,
            degenerate: false,
            t_vars: t_new.iter().map(|t| t.as_slice().to_vec()).collect(),
            identity_residual: None,
            block_rank_ratios: None,
        });
        let _ = &sdr.duals;

        x_converged = sdr.x.clone();
        let stop = step <= cfg.epsilon;
        t_prev = t_new;
        x_prev = sdr.x;
        if stop {
            status = AlgStatus::Converged;
            break;
        }
    }

    // randomized rank-1 extraction from the converged high-rank iterate
    let x_herm = HermitianMatrix::from_mat(&x_converged)?;
    let candidates = randomize_gaussian_rank1(&x_herm, cfg.t_rand, rng)?;
    let mut best: Option<(f64, usize, Vec<cx_linalg::Complex64>)> = None;
    for (idx, cand) in candidates.into_iter().enumerate() {
        let min_v = couplings
            .iter()
            .map(|c| {
                let t = aux_from_vector(&cand, c)?;
                Ok::<f64, WaveformError>(scale.beta2 * t.t0() - g_exact(&t, scale))
            })
            .try_fold(f64::INFINITY, |acc, v| Ok::<f64, WaveformError>(acc.min(v?)))?;
        let better = match &best {
            None => true,
            Some((cur, _, _)) => min_v > *cur,
        };
        if better {
            best = Some((min_v, idx, cand));
        }
    }
    let (_, chosen, mut s_star) = best.expect("at least one candidate");
    trace
        .notes
        .push(format!("randomization selected candidate {chosen} of {}", cfg.t_rand));

    scale_to_budget(&mut s_star, p_total);
    let precoder = WaveformPrecoder::new(m, n, s_star)?;
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
