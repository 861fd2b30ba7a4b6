//! Deterministic rank reduction of a feasible SDP solution.
//!
//! Given an optimal solution of a separable SDP with m linear
//! constraints, repeatedly factor each block X = V V^H, find a nonzero
//! Hermitian direction D with sum_b Tr{V_b^H A_{i,b} V_b D_b} = 0 for
//! every constraint i, and update X <- V (I - D/delta) V^H where delta
//! is the extreme eigenvalue of D. Every constraint function value
//! Tr{A_i X} is preserved exactly by construction (so slacks and the
//! active set never move), the objective is preserved through
//! complementary slackness, and at least one block loses a rank per
//! round. The loop ends when only the zero direction remains, which
//! guarantees sum_b rank^2(X_b) <= m.
//!
//! Null directions come from deterministic Gram-Schmidt probes, so the
//! procedure is a pure function of its inputs.

use cx_linalg::{herm_eig, CxMat, HermitianMatrix};
use num_complex::Complex64;

use crate::error::SdpError;
use crate::problem::SdpProblem;
use crate::solver::SdpSolution;

/// Eigenvalues below this fraction of the block's largest are treated
/// as zero when factoring X = V V^H.
const RANK_REL_TOL: f64 = 1e-10;

pub fn rank_reduce(sol: &SdpSolution, p: &SdpProblem) -> Result<SdpSolution, SdpError> {
    p.validate()?;
    if sol.blocks.len() != p.block_dims.len() {
        return Err(SdpError::InvalidProblem(
            "solution block count does not match problem".into(),
        ));
    }

    let n_blocks = p.block_dims.len();
    let m_cons = p.constraints.len();
    let mut blocks: Vec<CxMat> = sol.blocks.iter().map(|b| b.hermitian_part()).collect();

    let before_obj = p.objective_value(&sol.blocks);
    let before_con: Vec<f64> = (0..m_cons)
        .map(|i| p.constraint_value(i, &sol.blocks))
        .collect();

    let mut notes = sol.notes.clone();
    let max_rounds = 4 * blocks.iter().map(|b| b.rows()).sum::<usize>().max(4);
    let mut progressed = false;

    for _round in 0..max_rounds {
        // factor every block
        let mut factors: Vec<CxMat> = Vec::with_capacity(n_blocks);
        let mut ranks: Vec<usize> = Vec::with_capacity(n_blocks);
        for x in &blocks {
            let (v, r) = factor_psd(x)?;
            factors.push(v);
            ranks.push(r);
        }
        let n_par: usize = ranks.iter().map(|r| r * r).sum();
        if n_par == 0 {
            break;
        }

        // real linear system rows: one per constraint, unknowns are the
        // Hermitian parameters of D per block
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m_cons);
        for con in &p.constraints {
            let mut row = vec![0.0f64; n_par];
            let mut offset = 0usize;
            for (bi, r) in ranks.iter().enumerate() {
                if *r > 0 {
                    let mut reduced: Option<CxMat> = None;
                    for (blk, a) in &con.coeffs {
                        if *blk == bi {
                            let w = factors[bi].adjoint().matmul(a).matmul(&factors[bi]);
                            reduced = Some(match reduced {
                                None => w,
                                Some(prev) => prev.add(&w),
                            });
                        }
                    }
                    if let Some(w) = reduced {
                        fill_row(&mut row[offset..offset + r * r], &w.hermitian_part(), *r);
                    }
                }
                offset += r * r;
            }
            rows.push(row);
        }

        let Some(direction) = null_direction(&rows, n_par) else {
            if n_par > m_cons && !progressed {
                notes.push(format!(
                    "rank reduction found no null direction with sum rank^2 = {n_par} > {m_cons} constraints"
                ));
            }
            break;
        };

        // assemble per-block Hermitian D and its extreme eigenvalue
        let mut deltas: Vec<Option<CxMat>> = Vec::with_capacity(n_blocks);
        let mut offset = 0usize;
        let mut best: Option<f64> = None; // signed extreme eigenvalue
        for r in &ranks {
            if *r == 0 {
                deltas.push(None);
                continue;
            }
            let d = unfill_row(&direction[offset..offset + r * r], *r);
            offset += r * r;
            let eig = herm_eig(&HermitianMatrix::from_mat(&d)?)?;
            for &lambda in [eig.eigenvalues[0], eig.eigenvalues[*r - 1]].iter() {
                let better = match best {
                    None => true,
                    Some(cur) => {
                        lambda.abs() > cur.abs() || (lambda.abs() == cur.abs() && lambda > cur)
                    }
                };
                if better {
                    best = Some(lambda);
                }
            }
            deltas.push(Some(d));
        }
        let Some(delta) = best else { break };
        if delta.abs() < 1e-12 {
            break;
        }

        // X <- V (I - D/delta) V^H
        for (bi, maybe_d) in deltas.iter().enumerate() {
            let Some(d) = maybe_d else { continue };
            let r = ranks[bi];
            let mut core = CxMat::identity(r);
            core.add_assign_scaled(d, Complex64::new(-1.0 / delta, 0.0));
            blocks[bi] = factors[bi]
                .matmul(&core)
                .matmul(&factors[bi].adjoint())
                .hermitian_part();
        }
        progressed = true;
    }

    if !progressed {
        let mut out = sol.clone();
        out.notes = notes;
        return Ok(out);
    }

    let after_obj = p.objective_value(&blocks);
    let mut max_con_drift = 0.0f64;
    for (i, before) in before_con.iter().enumerate() {
        let drift = (p.constraint_value(i, &blocks) - before).abs()
            / (1.0 + p.constraints[i].rhs.abs());
        max_con_drift = max_con_drift.max(drift);
    }
    notes.push(format!(
        "rank reduction: objective drift {:.3e}, max constraint drift {:.3e}",
        (after_obj - before_obj).abs() / (1.0 + before_obj.abs()),
        max_con_drift
    ));

    Ok(SdpSolution {
        blocks,
        duals: sol.duals.clone(),
        objective: after_obj,
        gap: sol.gap,
        status: sol.status,
        iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        notes,
        iterates: sol.iterates.clone(),
    })
}

/// Factor a PSD block as V V^H with V of full column rank.
fn factor_psd(x: &CxMat) -> Result<(CxMat, usize), SdpError> {
    let n = x.rows();
    let eig = herm_eig(&HermitianMatrix::from_mat(x)?)?;
    let lambda_max = eig.eigenvalues[n - 1].max(0.0);
    let threshold = RANK_REL_TOL * lambda_max;
    let kept: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] > threshold && eig.eigenvalues[i] > 0.0)
        .collect();
    let r = kept.len();
    let mut v = CxMat::zeros(n, r);
    for (col, &i) in kept.iter().enumerate() {
        let scale = eig.eigenvalues[i].sqrt();
        let u = eig.eigenvector(i);
        for row in 0..n {
            v[(row, col)] = u[row] * scale;
        }
    }
    Ok((v, r))
}

/// Real parameterization of Tr{W D} over Hermitian D (r x r):
/// diagonal entries, then (2 Re W_jk, 2 Im W_jk) per off-diagonal pair.
fn fill_row(row: &mut [f64], w: &CxMat, r: usize) {
    let mut idx = 0usize;
    for j in 0..r {
        row[idx] = w[(j, j)].re;
        idx += 1;
    }
    for j in 0..r {
        for k in (j + 1)..r {
            row[idx] = 2.0 * w[(j, k)].re;
            idx += 1;
            row[idx] = 2.0 * w[(j, k)].im;
            idx += 1;
        }
    }
    debug_assert_eq!(idx, r * r);
}

/// Inverse of `fill_row`'s parameterization.
fn unfill_row(params: &[f64], r: usize) -> CxMat {
    let mut d = CxMat::zeros(r, r);
    let mut idx = 0usize;
    for j in 0..r {
        d[(j, j)] = Complex64::new(params[idx], 0.0);
        idx += 1;
    }
    for j in 0..r {
        for k in (j + 1)..r {
            let re = params[idx];
            idx += 1;
            let im = params[idx];
            idx += 1;
            d[(j, k)] = Complex64::new(re, im);
            d[(k, j)] = Complex64::new(re, -im);
        }
    }
    d
}

/// Deterministic null-space vector of the row system, or None when the
/// rows span the whole parameter space. Probes the standard basis in
/// order and projects out the row space (two Gram-Schmidt passes).
fn null_direction(rows: &[Vec<f64>], n_par: usize) -> Option<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let row_norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 * (1.0 + row_norm) {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    if basis.len() >= n_par {
        return None;
    }
    for probe in 0..n_par {
        let mut v = vec![0.0f64; n_par];
        v[probe] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            return Some(v);
        }
    }
    None
}

/// Numerical rank of a PSD block by relative eigenvalue threshold.
pub fn numerical_rank(x: &CxMat, rel_tol: f64) -> Result<usize, SdpError> {
    let eig = herm_eig(&HermitianMatrix::from_mat(x)?)?;
    let lambda_max = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > rel_tol * lambda_max && l > 0.0)
        .count())
}
