//! Primal-dual interior-point solver for small dense complex SDPs.
//!
//! Inequalities become equalities with nonnegative scalar slacks (1x1
//! PSD blocks), so one code path handles everything. The search
//! direction is the HKM/XZ linearization with Mehrotra
//! predictor-corrector; steps stay strictly inside the cone via
//! Cholesky-based maximum step lengths. Infeasibility is certified by a
//! phase-1 solve (minimize the interpolation parameter toward a known
//! interior point) rather than guessed from residual stalls.

use cx_linalg::{herm_eig, CxMat, HermitianMatrix};
use num_complex::Complex64;

use crate::error::SdpError;
use crate::problem::{Constraint, SdpProblem, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

/// One interior-point iterate, kept for post-hoc diagnostics (weak
/// duality holds whenever both residuals are small).
#[derive(Debug, Clone, Copy)]
pub struct IterateRecord {
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Primal blocks in the original problem's block order.
    pub blocks: Vec<CxMat>,
    /// Dual multiplier per constraint.
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Relative duality gap at exit.
    pub gap: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    /// max_i |A_i(X) - b_i| / (1 + |b_i|) over equality form rows.
    pub primal_residual: f64,
    /// ||C - S - A^T y||_F / (1 + ||C||_F).
    pub dual_residual: f64,
    pub notes: Vec<String>,
    pub iterates: Vec<IterateRecord>,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative duality gap target.
    pub tol: f64,
    pub max_iter: usize,
    /// Optional strictly feasible start for the original blocks; slack
    /// values are derived from it.
    pub initial_primal: Option<Vec<CxMat>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 100,
            initial_primal: None,
        }
    }
}

pub fn solve_sdp(p: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution, SdpError> {
    solve_sdp_with(
        p,
        &SolverOptions {
            tol,
            max_iter,
            ..Default::default()
        },
    )
}

/// Standard-form view: equality constraints over original + slack blocks.
struct StdForm {
    dims: Vec<usize>,
    n_original: usize,
    c: Vec<CxMat>,
    /// a[i] = sparse coefficient list (block, Hermitian matrix).
    a: Vec<Vec<(usize, CxMat)>>,
    b: Vec<f64>,
}

impl StdForm {
    fn build(p: &SdpProblem) -> Self {
        let n_original = p.block_dims.len();
        let mut dims = p.block_dims.clone();
        let mut c: Vec<CxMat> = dims.iter().map(|&d| CxMat::zeros(d, d)).collect();
        for (b, coeff) in &p.objective {
            c[*b] = c[*b].add(&coeff.hermitian_part());
        }
        let mut a = Vec::with_capacity(p.constraints.len());
        let mut b_vec = Vec::with_capacity(p.constraints.len());
        for con in &p.constraints {
            let mut coeffs: Vec<(usize, CxMat)> = con
                .coeffs
                .iter()
                .map(|(blk, m)| (*blk, m.hermitian_part()))
                .collect();
            if con.sense == Sense::Le {
                let slack_idx = dims.len();
                dims.push(1);
                c.push(CxMat::zeros(1, 1));
                coeffs.push((slack_idx, CxMat::identity(1)));
            }
            a.push(coeffs);
            b_vec.push(con.rhs);
        }
        StdForm {
            dims,
            n_original,
            c,
            a,
            b: b_vec,
        }
    }

    fn n_total(&self) -> f64 {
        self.dims.iter().sum::<usize>() as f64
    }

    fn inner(coeffs: &[(usize, CxMat)], x: &[CxMat]) -> f64 {
        coeffs
            .iter()
            .map(|(b, m)| m.trace_product_re(&x[*b]))
            .sum()
    }
}

fn chol_with_ridge(x: &CxMat) -> Result<CxMat, SdpError> {
    if let Ok(l) = x.cholesky() {
        return Ok(l);
    }
    let n = x.rows();
    let mut ridge = 1e-14 * (1.0 + x.trace().re.abs());
    for _ in 0..4 {
        let mut shifted = x.clone();
        for i in 0..n {
            shifted[(i, i)] += Complex64::new(ridge, 0.0);
        }
        if let Ok(l) = shifted.cholesky() {
            return Ok(l);
        }
        ridge *= 100.0;
    }
    Err(SdpError::Numerical(
        "cone iterate lost positive definiteness".into(),
    ))
}

/// Largest step t with X + t*dX staying PSD (up to the boundary).
fn max_step(x: &CxMat, dx: &CxMat) -> Result<f64, SdpError> {
    let l = chol_with_ridge(x)?;
    let n = x.rows();
    // W = L^{-1} dx L^{-H}, Hermitian
    let mut y = CxMat::zeros(n, n);
    for j in 0..n {
        let col = l.solve_lower(&dx.column(j));
        y.set_column(j, &col);
    }
    let yh = y.adjoint();
    let mut z = CxMat::zeros(n, n);
    for j in 0..n {
        let col = l.solve_lower(&yh.column(j));
        z.set_column(j, &col);
    }
    let w = z.adjoint().hermitian_part();
    let eig = herm_eig(&HermitianMatrix::from_mat(&w)?)?;
    let lambda_min = eig.eigenvalues[0];
    if lambda_min >= -1e-14 {
        Ok(f64::INFINITY)
    } else {
        Ok(-1.0 / lambda_min)
    }
}

/// Solve the real symmetric Schur system with Cholesky, adding a ridge
/// when constraints are (nearly) linearly dependent.
fn solve_schur(m: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>, SdpError> {
    let n = rhs.len();
    let scale: f64 = (0..n).map(|i| m[i][i].abs()).sum::<f64>() / n as f64;
    let mut ridge = 0.0;
    for attempt in 0..5 {
        let mut l = vec![vec![0.0f64; n]; n];
        let mut ok = true;
        'outer: for j in 0..n {
            let mut d = m[j][j] + ridge;
            for k in 0..j {
                d -= l[j][k] * l[j][k];
            }
            if d <= 0.0 || !d.is_finite() {
                ok = false;
                break 'outer;
            }
            l[j][j] = d.sqrt();
            for i in (j + 1)..n {
                let mut s = m[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                l[i][j] = s / l[j][j];
            }
        }
        if ok {
            // forward/back substitution
            let mut x = rhs.to_vec();
            for i in 0..n {
                for k in 0..i {
                    x[i] -= l[i][k] * x[k];
                }
                x[i] /= l[i][i];
            }
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    x[i] -= l[k][i] * x[k];
                }
                x[i] /= l[i][i];
            }
            return Ok(x);
        }
        ridge = (scale.max(1e-300)) * 1e-12 * 10f64.powi(attempt);
    }
    Err(SdpError::Numerical("schur system not positive definite".into()))
}

pub fn solve_sdp_with(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution, SdpError> {
    p.validate()?;
    solve_std(p, opts, 0)
}

fn solve_std(p: &SdpProblem, opts: &SolverOptions, depth: usize) -> Result<SdpSolution, SdpError> {
    let std = StdForm::build(p);
    let m_cons = std.b.len();
    let n_tot = std.n_total();

    // --- initial point ---------------------------------------------------
    let mut x: Vec<CxMat> = init_primal(&std, opts);
    let (mut y, mut s) = init_dual(&std);

    let _b_scale = 1.0 + std.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c_scale = 1.0 + std.c.iter().map(|c| c.frobenius_norm()).sum::<f64>();
    let feas_tol = 1e-9;

    let mut iterates = Vec::new();
    let mut notes = Vec::new();
    let mut rp_history: Vec<f64> = Vec::new();

    let mut status = SdpStatus::MaxIter;
    let mut iterations = opts.max_iter;

    for iter in 0..opts.max_iter {
        // residuals
        let rp: Vec<f64> = (0..m_cons)
            .map(|i| std.b[i] - StdForm::inner(&std.a[i], &x))
            .collect();
        let rd: Vec<CxMat> = (0..std.dims.len())
            .map(|bidx| {
                let mut r = std.c[bidx].sub(&s[bidx]);
                for (i, coeffs) in std.a.iter().enumerate() {
                    for (blk, mat) in coeffs {
                        if *blk == bidx {
                            r.add_assign_scaled(mat, Complex64::new(-y[i], 0.0));
                        }
                    }
                }
                r
            })
            .collect();

        let rp_scaled = rp
            .iter()
            .zip(&std.b)
            .map(|(r, b)| r.abs() / (1.0 + b.abs()))
            .fold(0.0f64, f64::max);
        let rd_scaled = rd.iter().map(|r| r.frobenius_norm()).sum::<f64>() / c_scale;

        let p_obj: f64 = std
            .c
            .iter()
            .zip(&x)
            .map(|(c, xb)| c.trace_product_re(xb))
            .sum();
        let d_obj: f64 = std.b.iter().zip(&y).map(|(b, yi)| b * yi).sum();
        let xs: f64 = x.iter().zip(&s).map(|(xb, sb)| xb.trace_product_re(sb)).sum();
        let mu = xs / n_tot;
        let gap_rel = xs.abs() / (1.0 + p_obj.abs() + d_obj.abs());

        iterates.push(IterateRecord {
            primal_obj: p_obj,
            dual_obj: d_obj,
            primal_residual: rp_scaled,
            dual_residual: rd_scaled,
            mu,
        });
        rp_history.push(rp_scaled);

        if rp_scaled <= feas_tol && rd_scaled <= opts.tol && gap_rel <= opts.tol {
            status = SdpStatus::Optimal;
            iterations = iter;
            break;
        }

        let finite = x.iter().all(|b| b.is_finite())
            && s.iter().all(|b| b.is_finite())
            && y.iter().all(|v| v.is_finite());

        // stalled or diverging primal feasibility -> certify with phase 1
        let stalled = iter >= 25 && rp_scaled > 1e-5 && {
            let window = &rp_history[iter - 10..=iter];
            !(window.last().unwrap() < &(0.5 * window.first().unwrap()))
        };
        if !finite || (depth == 0 && stalled) {
            if depth == 0 {
                if phase1_certifies_infeasible(p, opts)? {
                    status = SdpStatus::Infeasible;
                    iterations = iter;
                    notes.push("phase-1 certificate: no feasible point".into());
                    break;
                }
                if !finite {
                    return Err(SdpError::Numerical(
                        "iterates diverged on a feasible problem".into(),
                    ));
                }
                notes.push("phase-1 found the problem feasible; continuing".into());
                rp_history.clear();
            } else {
                return Err(SdpError::Numerical("iterates diverged".into()));
            }
        }

        let step = ipm_step(&std, &mut x, &mut s, &mut y, &rp, &rd, mu, n_tot, iter);
        if let Err(err) = step {
            if depth == 0 && phase1_certifies_infeasible(p, opts)? {
                status = SdpStatus::Infeasible;
                iterations = iter;
                notes.push(format!("phase-1 certificate after numerical failure: {err}"));
                break;
            }
            return Err(err);
        }
    }

    // final diagnostics on the augmented system
    let rp_final: Vec<f64> = (0..m_cons)
        .map(|i| std.b[i] - StdForm::inner(&std.a[i], &x))
        .collect();
    let rp_scaled = rp_final
        .iter()
        .zip(&std.b)
        .map(|(r, b)| r.abs() / (1.0 + b.abs()))
        .fold(0.0f64, f64::max);
    let rd_scaled = {
        let mut acc = 0.0;
        for bidx in 0..std.dims.len() {
            let mut r = std.c[bidx].sub(&s[bidx]);
            for (i, coeffs) in std.a.iter().enumerate() {
                for (blk, mat) in coeffs {
                    if *blk == bidx {
                        r.add_assign_scaled(mat, Complex64::new(-y[i], 0.0));
                    }
                }
            }
            acc += r.frobenius_norm();
        }
        acc / c_scale
    };
    let p_obj: f64 = std
        .c
        .iter()
        .zip(&x)
        .map(|(c, xb)| c.trace_product_re(xb))
        .sum();
    let d_obj: f64 = std.b.iter().zip(&y).map(|(b, yi)| b * yi).sum();
    let xs: f64 = x.iter().zip(&s).map(|(xb, sb)| xb.trace_product_re(sb)).sum();
    let gap_rel = xs.abs() / (1.0 + p_obj.abs() + d_obj.abs());

    if status == SdpStatus::MaxIter {
        notes.push(format!(
            "stopped after {} iterations: gap {:.3e}, primal residual {:.3e}, dual residual {:.3e}",
            opts.max_iter, gap_rel, rp_scaled, rd_scaled
        ));
    }

    Ok(SdpSolution {
        blocks: x[..std.n_original].to_vec(),
        duals: y,
        objective: p_obj,
        gap: gap_rel,
        status,
        iterations,
        primal_residual: rp_scaled,
        dual_residual: rd_scaled,
        notes,
        iterates,
    })
}

/// One Mehrotra predictor-corrector step with the HKM direction.
#[allow(clippy::too_many_arguments)]
fn ipm_step(
    std: &StdForm,
    x: &mut [CxMat],
    s: &mut [CxMat],
    y: &mut [f64],
    rp: &[f64],
    rd: &[CxMat],
    mu: f64,
    n_tot: f64,
    iter: usize,
) -> Result<(), SdpError> {
    let m_cons = rp.len();
    // S^{-1} per block
    let s_inv: Vec<CxMat> = s
        .iter()
        .map(|sb| chol_with_ridge(sb).and_then(|_| sb.hpd_inverse().map_err(SdpError::from)))
        .collect::<Result<_, _>>()?;

    // W[j][b] = X_b A_{j,b} S_b^{-1} for touched blocks
    let w: Vec<Vec<(usize, CxMat)>> = std
        .a
        .iter()
        .map(|coeffs| {
            coeffs
                .iter()
                .map(|(blk, mat)| (*blk, x[*blk].matmul(mat).matmul(&s_inv[*blk])))
                .collect()
        })
        .collect();

    // Schur complement M_ij = sum_b Re tr(A_{i,b} W_{j,b})
    let mut schur = vec![vec![0.0f64; m_cons]; m_cons];
    for i in 0..m_cons {
        for j in 0..m_cons {
            let mut acc = 0.0;
            for (blk_i, a_i) in &std.a[i] {
                for (blk_j, w_j) in &w[j] {
                    if blk_i == blk_j {
                        acc += a_i.trace_product_re(w_j);
                    }
                }
            }
            schur[i][j] = acc;
        }
    }
    for i in 0..m_cons {
        for j in (i + 1)..m_cons {
            let v = 0.5 * (schur[i][j] + schur[j][i]);
            schur[i][j] = v;
            schur[j][i] = v;
        }
    }

    let x_rd_sinv: Vec<CxMat> = (0..std.dims.len())
        .map(|bi| x[bi].matmul(&rd[bi]).matmul(&s_inv[bi]))
        .collect();

    // predictor (affine direction)
    let h_aff: Vec<CxMat> = (0..std.dims.len())
        .map(|bi| x[bi].scale_re(-1.0).sub(&x_rd_sinv[bi]))
        .collect();
    let (dx_aff, ds_aff, _dy_aff) = directions(std, &schur, rp, rd, &h_aff, &w)?;
    let ap_aff = step_all(x, &dx_aff)?.min(1.0);
    let ad_aff = step_all(s, &ds_aff)?.min(1.0);
    let mu_aff = {
        let mut acc = 0.0;
        for bi in 0..std.dims.len() {
            let xn = x[bi].add(&dx_aff[bi].scale_re(ap_aff));
            let sn = s[bi].add(&ds_aff[bi].scale_re(ad_aff));
            acc += xn.trace_product_re(&sn);
        }
        (acc / n_tot).max(0.0)
    };
    let sigma = (mu_aff / mu).powi(3).clamp(1e-8, 0.999);

    // corrector
    let h_corr: Vec<CxMat> = (0..std.dims.len())
        .map(|bi| {
            let mut h = s_inv[bi].scale_re(sigma * mu);
            h = h.sub(&x[bi]);
            h = h.sub(&x_rd_sinv[bi]);
            let corr = dx_aff[bi].matmul(&ds_aff[bi]).matmul(&s_inv[bi]);
            h.sub(&corr)
        })
        .collect();
    let (dx, ds, dy) = directions(std, &schur, rp, rd, &h_corr, &w)?;

    let tau = if iter < 3 { 0.95 } else { 0.98 };
    let ap = (tau * step_all(x, &dx)?).min(1.0);
    let ad = (tau * step_all(s, &ds)?).min(1.0);

    for bi in 0..std.dims.len() {
        x[bi] = x[bi].add(&dx[bi].scale_re(ap)).hermitian_part();
        s[bi] = s[bi].add(&ds[bi].scale_re(ad)).hermitian_part();
    }
    for i in 0..m_cons {
        y[i] += ad * dy[i];
    }
    Ok(())
}

/// Solve the Newton system for a given right-hand side built from H.
#[allow(clippy::type_complexity)]
fn directions(
    std: &StdForm,
    schur: &[Vec<f64>],
    rp: &[f64],
    rd: &[CxMat],
    h: &[CxMat],
    w: &[Vec<(usize, CxMat)>],
) -> Result<(Vec<CxMat>, Vec<CxMat>, Vec<f64>), SdpError> {
    let m_cons = rp.len();
    let rhs: Vec<f64> = (0..m_cons)
        .map(|i| {
            let mut v = rp[i];
            for (blk, mat) in &std.a[i] {
                v -= mat.trace_product_re(&h[*blk]);
            }
            v
        })
        .collect();
    let dy = solve_schur(schur, &rhs)?;
    let ds: Vec<CxMat> = (0..std.dims.len())
        .map(|bi| {
            let mut r = rd[bi].clone();
            for (i, coeffs) in std.a.iter().enumerate() {
                for (blk, mat) in coeffs {
                    if *blk == bi {
                        r.add_assign_scaled(mat, Complex64::new(-dy[i], 0.0));
                    }
                }
            }
            r.hermitian_part()
        })
        .collect();
    let dx: Vec<CxMat> = (0..std.dims.len())
        .map(|bi| {
            let mut d = h[bi].clone();
            for (i, w_i) in w.iter().enumerate() {
                for (blk, w_mat) in w_i {
                    if *blk == bi {
                        d.add_assign_scaled(w_mat, Complex64::new(dy[i], 0.0));
                    }
                }
            }
            d.hermitian_part()
        })
        .collect();
    Ok((dx, ds, dy))
}

fn step_all(x: &[CxMat], dx: &[CxMat]) -> Result<f64, SdpError> {
    let mut step = f64::INFINITY;
    for (xb, dxb) in x.iter().zip(dx) {
        step = step.min(max_step(xb, dxb)?);
    }
    Ok(step.min(1e12))
}

/// Initial primal iterate: caller-provided strictly feasible blocks when
/// available (slacks derived), otherwise identity scaled from trace
/// bounds / problem data.
fn init_primal(std: &StdForm, opts: &SolverOptions) -> Vec<CxMat> {
    let mut x: Vec<CxMat> = Vec::with_capacity(std.dims.len());
    if let Some(initial) = &opts.initial_primal {
        if initial.len() == std.n_original
            && initial
                .iter()
                .zip(&std.dims)
                .all(|(m, d)| m.rows() == *d && m.cols() == *d)
        {
            x.extend(initial.iter().map(|m| m.hermitian_part()));
        }
    }
    if x.is_empty() {
        // identity scale: prefer an explicit trace bound row c*I on the
        // block, staying at half the bound; fall back to data scale
        for (bi, &dim) in std.dims.iter().take(std.n_original).enumerate() {
            let mut rho = f64::NAN;
            for (i, coeffs) in std.a.iter().enumerate() {
                if coeffs.len() > 2 {
                    continue;
                }
                for (blk, mat) in coeffs {
                    if *blk != bi {
                        continue;
                    }
                    let diag = mat[(0, 0)].re;
                    if diag <= 0.0 || std.b[i] <= 0.0 {
                        continue;
                    }
                    let ident = mat.sub(&CxMat::scaled_identity(dim, diag));
                    if ident.frobenius_norm() <= 1e-12 * (1.0 + diag) {
                        let bound = std.b[i] / (diag * dim as f64);
                        rho = if rho.is_nan() { bound / 2.0 } else { rho.min(bound / 2.0) };
                    }
                }
            }
            if !rho.is_finite() || rho <= 0.0 {
                let bmax = std.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                rho = (1.0 + bmax) / dim as f64;
            }
            x.push(CxMat::scaled_identity(dim, rho));
        }
    }
    // slack values: interior regardless of the start's feasibility
    for (i, coeffs) in std.a.iter().enumerate() {
        let slack_blocks = coeffs.iter().filter(|(blk, _)| *blk >= std.n_original);
        for (blk, _) in slack_blocks {
            debug_assert_eq!(*blk, x.len());
            let partial: f64 = coeffs
                .iter()
                .filter(|(b2, _)| *b2 < std.n_original)
                .map(|(b2, m)| m.trace_product_re(&x[*b2]))
                .sum();
            let gap = std.b[i] - partial;
            let floor = 1e-2 * (1.0 + std.b[i].abs());
            x.push(CxMat::scaled_identity(1, gap.max(floor)));
        }
    }
    x
}

/// Dual start: least-squares fit of y against S ~ rho_d I, then shift S
/// to be safely positive definite (any gap is carried as dual residual).
fn init_dual(std: &StdForm) -> (Vec<f64>, Vec<CxMat>) {
    let m_cons = std.b.len();
    let rho_d = 1.0
        + std
            .c
            .iter()
            .map(|c| c.frobenius_norm())
            .fold(0.0f64, f64::max);
    // normal equations G y = g for min || C - rho_d I - sum y_i A_i ||
    let mut g_mat = vec![vec![0.0f64; m_cons]; m_cons];
    let mut g_rhs = vec![0.0f64; m_cons];
    for i in 0..m_cons {
        for j in 0..m_cons {
            let mut acc = 0.0;
            for (bi, ai) in &std.a[i] {
                for (bj, aj) in &std.a[j] {
                    if bi == bj {
                        acc += ai.trace_product_re(aj);
                    }
                }
            }
            g_mat[i][j] = acc;
        }
        let mut acc = 0.0;
        for (bi, ai) in &std.a[i] {
            let target = std.c[*bi].sub(&CxMat::scaled_identity(std.dims[*bi], rho_d));
            acc += ai.trace_product_re(&target);
        }
        g_rhs[i] = acc;
    }
    let y = solve_schur(&g_mat, &g_rhs).unwrap_or_else(|_| vec![0.0; m_cons]);

    let mut s = Vec::with_capacity(std.dims.len());
    for (bi, &dim) in std.dims.iter().enumerate() {
        let mut sb = std.c[bi].clone();
        for (i, coeffs) in std.a.iter().enumerate() {
            for (blk, mat) in coeffs {
                if *blk == bi {
                    sb.add_assign_scaled(mat, Complex64::new(-y[i], 0.0));
                }
            }
        }
        let sb = sb.hermitian_part();
        // shift to be positive definite
        let eig = herm_eig(&HermitianMatrix::from_mat(&sb).expect("finite dual start"))
            .expect("dual start eig");
        let lift = (rho_d * 0.1 - eig.eigenvalues[0]).max(0.0);
        let mut lifted = sb;
        if lift > 0.0 {
            for i in 0..dim {
                lifted[(i, i)] += Complex64::new(lift, 0.0);
            }
        }
        s.push(lifted);
    }
    (y, s)
}

/// Phase-1: minimize t >= 0 with A_i(X) + t * (b_i - A_i(X0)) = b_i and
/// the strictly feasible start (X0, t=1). Optimal t near zero means the
/// original constraints admit a feasible point.
fn phase1_certifies_infeasible(p: &SdpProblem, opts: &SolverOptions) -> Result<bool, SdpError> {
    let std = StdForm::build(p);
    // interpolation base point: scaled identities
    let x0: Vec<CxMat> = std
        .dims
        .iter()
        .map(|&d| CxMat::scaled_identity(d, 1.0))
        .collect();

    let theta_block = std.dims.len();
    let mut dims = std.dims.clone();
    dims.push(1);

    let mut constraints = Vec::with_capacity(std.b.len());
    for (i, coeffs) in std.a.iter().enumerate() {
        let r0 = std.b[i] - StdForm::inner(coeffs, &x0);
        let mut c2: Vec<(usize, CxMat)> = coeffs.clone();
        c2.push((theta_block, CxMat::scaled_identity(1, r0)));
        constraints.push(Constraint {
            coeffs: c2,
            sense: Sense::Eq,
            rhs: std.b[i],
        });
    }
    let aux = SdpProblem {
        block_dims: dims,
        objective: vec![(theta_block, CxMat::identity(1))],
        constraints,
    };
    let mut start = x0;
    start.push(CxMat::identity(1));
    let sol = solve_std(
        &aux,
        &SolverOptions {
            tol: 1e-8,
            max_iter: opts.max_iter,
            initial_primal: Some(start),
        },
        1,
    )?;
    let theta = sol.objective;
    let b_scale = 1.0 + std.b.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    Ok(sol.status == SdpStatus::Optimal && theta > 1e-6 * b_scale)
}
