//! Solver correctness against independent oracles: closed-form extreme
//! eigenvalue programs, a primal parametric grid search on the 2x2 PSD
//! cone, a dual grid search for 3x3 instances, weak duality along the
//! iterate trace, and the infeasibility certificate.

use cx_linalg::{herm_eig, Complex64, CxMat, HermitianMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdp::{solve_sdp, Constraint, SdpProblem, SdpStatus, Sense};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CxMat {
    let raw = CxMat::from_fn(n, n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    raw.hermitian_part()
}

fn min_eig(m: &CxMat) -> f64 {
    herm_eig(&HermitianMatrix::from_mat(m).unwrap())
        .unwrap()
        .eigenvalues[0]
}

#[test]
fn extreme_eigenvalue_sdp() {
    // min Tr{diag(1,-1) X} with Tr{X} <= 1: optimum -1 at X = e2 e2^H
    let mut cmat = CxMat::zeros(2, 2);
    cmat[(0, 0)] = c(1.0, 0.0);
    cmat[(1, 1)] = c(-1.0, 0.0);
    let p = SdpProblem {
        block_dims: vec![2],
        objective: vec![(0, cmat)],
        constraints: vec![Constraint {
            coeffs: vec![(0, CxMat::identity(2))],
            sense: Sense::Le,
            rhs: 1.0,
        }],
    };
    let sol = solve_sdp(&p, 1e-9, 100).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.objective + 1.0).abs() < 1e-7, "objective {}", sol.objective);
    let x = &sol.blocks[0];
    assert!(x[(1, 1)].re > 0.999);
    assert!(x[(0, 0)].re < 1e-6);
}

#[test]
fn negative_identity_objective_uses_full_trace() {
    let p_budget = 3.7;
    let p = SdpProblem {
        block_dims: vec![3],
        objective: vec![(0, CxMat::scaled_identity(3, -1.0))],
        constraints: vec![Constraint {
            coeffs: vec![(0, CxMat::identity(3))],
            sense: Sense::Le,
            rhs: p_budget,
        }],
    };
    let sol = solve_sdp(&p, 1e-9, 100).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.objective + p_budget).abs() < 1e-6 * p_budget);
}

#[test]
fn solution_blocks_stay_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..10 {
        let p = random_instance(3, 2, &mut rng);
        let sol = solve_sdp(&p, 1e-8, 100).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal, "trial {trial}");
        for b in &sol.blocks {
            assert!(min_eig(b) >= -1e-9 * (1.0 + b.frobenius_norm()));
        }
    }
}

/// Random single-block instance with a trace bound plus `extra` random
/// <= constraints (feasible by construction: X = 0 is interior-adjacent
/// since every rhs is positive).
fn random_instance(dim: usize, extra: usize, rng: &mut ChaCha8Rng) -> SdpProblem {
    let cmat = random_hermitian(dim, rng);
    let mut constraints = vec![Constraint {
        coeffs: vec![(0, CxMat::identity(dim))],
        sense: Sense::Le,
        rhs: 1.0 + rng.gen_range(0.0..2.0),
    }];
    for _ in 0..extra {
        constraints.push(Constraint {
            coeffs: vec![(0, random_hermitian(dim, rng))],
            sense: Sense::Le,
            rhs: rng.gen_range(0.5..2.0),
        });
    }
    SdpProblem {
        block_dims: vec![dim],
        objective: vec![(0, cmat)],
        constraints,
    }
}

/// Dual brute force: max -b^T lam over lam >= 0 with C + sum lam_i A_i
/// PSD. The trace row (identity coefficient) is eliminated exactly:
/// for fixed remaining multipliers, lam_tr = max(0, -lambda_min/c). The
/// reduced function is concave, so a zooming dense grid over the at most
/// two remaining multipliers is reliable. Strong duality (Slater holds:
/// small multiples of I are strictly feasible) makes this the primal
/// optimum.
fn dual_grid_oracle(p: &SdpProblem, passes: usize, grid: usize) -> f64 {
    let m = p.constraints.len();
    let dim = p.block_dims[0];
    let cmat = p
        .objective
        .iter()
        .fold(CxMat::zeros(dim, dim), |acc, (_, mat)| acc.add(mat));

    // locate the trace row
    let tr_row = (0..m)
        .find(|&i| {
            let (_, a) = &p.constraints[i].coeffs[0];
            let diag = a[(0, 0)].re;
            diag > 0.0 && a.sub(&CxMat::scaled_identity(dim, diag)).frobenius_norm() < 1e-12
        })
        .expect("oracle needs a trace-bound row");
    let tr_coef = p.constraints[tr_row].coeffs[0].1[(0, 0)].re;
    let rest: Vec<usize> = (0..m).filter(|&i| i != tr_row).collect();
    assert!(rest.len() <= 2, "oracle grids at most two multipliers");

    let eval = |lam_rest: &[f64]| -> f64 {
        let mut shifted = cmat.clone();
        for (&i, &l) in rest.iter().zip(lam_rest) {
            for (blk, a) in &p.constraints[i].coeffs {
                assert_eq!(*blk, 0);
                shifted.add_assign_scaled(a, c(l, 0.0));
            }
        }
        let lam_tr = (-min_eig(&shifted) / tr_coef).max(0.0);
        let mut val = -lam_tr * p.constraints[tr_row].rhs;
        for (&i, &l) in rest.iter().zip(lam_rest) {
            val -= l * p.constraints[i].rhs;
        }
        val
    };

    if rest.is_empty() {
        return eval(&[]);
    }
    let nrest = rest.len();
    let mut center = vec![5.0f64; nrest];
    let mut half = 5.0f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_lam = center.clone();
    for _ in 0..passes {
        let mut idx = vec![0usize; nrest];
        loop {
            let lam: Vec<f64> = (0..nrest)
                .map(|i| (center[i] - half + 2.0 * half * idx[i] as f64 / (grid - 1) as f64).max(0.0))
                .collect();
            let val = eval(&lam);
            if val > best {
                best = val;
                best_lam = lam;
            }
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] < grid {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == nrest {
                    break;
                }
            }
            if k == nrest {
                break;
            }
        }
        center = best_lam.clone();
        half = (8.0 * half) / (grid - 1) as f64;
    }
    best
}

#[test]
fn random_3x3_matches_dual_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..5 {
        let p = random_instance(3, 2, &mut rng);
        let sol = solve_sdp(&p, 1e-9, 100).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let oracle = dual_grid_oracle(&p, 11, 41);
        assert!(
            (sol.objective - oracle).abs() <= 1e-5 * (1.0 + oracle.abs()),
            "trial {trial}: solver {} vs oracle {}",
            sol.objective,
            oracle
        );
    }
}

/// Primal parametric brute force on the 2x2 PSD cone. The diagonal
/// (a, b) is a zooming dense grid; for fixed diagonal the off-diagonal
/// entry z ranges over the disc |z|^2 <= a*b, where objective and
/// constraints are linear in (Re z, Im z). That 2-D subproblem is solved
/// exactly by enumerating the extreme points of disc intersect
/// half-planes (tangent point, line-disc and line-line intersections).
fn primal_grid_2x2(p: &SdpProblem, passes: usize, grid: usize) -> f64 {
    let trace_cap = p.constraints[0].rhs;
    let cmat = p
        .objective
        .iter()
        .fold(CxMat::zeros(2, 2), |acc, (_, m)| acc.add(m));
    let e00 = {
        let mut m = CxMat::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        m
    };
    let e11 = {
        let mut m = CxMat::zeros(2, 2);
        m[(1, 1)] = c(1.0, 0.0);
        m
    };
    let e_re = {
        let mut m = CxMat::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        m
    };
    let e_im = {
        let mut m = CxMat::zeros(2, 2);
        m[(0, 1)] = c(0.0, 1.0);
        m[(1, 0)] = c(0.0, -1.0);
        m
    };
    // X(a,b,u,v) = a E00 + b E11 + u E_re + v E_im, PSD iff u^2+v^2 <= ab
    struct Lin {
        base_a: f64,
        base_b: f64,
        u: f64,
        v: f64,
        rhs: f64,
    }
    let lin_of = |m: &CxMat, rhs: f64| Lin {
        base_a: m.trace_product_re(&e00),
        base_b: m.trace_product_re(&e11),
        u: m.trace_product_re(&e_re),
        v: m.trace_product_re(&e_im),
        rhs,
    };
    let obj = lin_of(&cmat, 0.0);
    let cons: Vec<Lin> = p
        .constraints
        .iter()
        .map(|con| {
            assert_eq!(con.sense, Sense::Le);
            let total = con
                .coeffs
                .iter()
                .fold(CxMat::zeros(2, 2), |acc, (_, m)| acc.add(m));
            lin_of(&total, con.rhs)
        })
        .collect();

    // exact minimum over the disc for a fixed diagonal; returns None
    // when no feasible off-diagonal exists
    let solve_disc = |a: f64, b: f64| -> Option<f64> {
        let rho2 = a * b;
        let rho = rho2.max(0.0).sqrt();
        let slack: Vec<f64> = cons
            .iter()
            .map(|l| l.rhs - l.base_a * a - l.base_b * b)
            .collect();
        let feasible = |u: f64, v: f64| -> bool {
            u * u + v * v <= rho2 + 1e-12 * (1.0 + rho2)
                && cons
                    .iter()
                    .zip(&slack)
                    .all(|(l, s)| l.u * u + l.v * v <= s + 1e-10 * (1.0 + s.abs()))
        };
        let mut cands: Vec<(f64, f64)> = Vec::new();
        cands.push((0.0, 0.0));
        // disc tangent point against the objective gradient
        let gn = (obj.u * obj.u + obj.v * obj.v).sqrt();
        if gn > 0.0 {
            cands.push((-rho * obj.u / gn, -rho * obj.v / gn));
        }
        // line-disc intersections
        for (l, s) in cons.iter().zip(&slack) {
            let nn = l.u * l.u + l.v * l.v;
            if nn < 1e-30 {
                continue;
            }
            let d = s / nn;
            let (px, py) = (l.u * d, l.v * d);
            let h2 = rho2 - (px * px + py * py);
            if h2 >= 0.0 {
                let h = h2.sqrt() / nn.sqrt();
                cands.push((px - l.v * h, py + l.u * h));
                cands.push((px + l.v * h, py - l.u * h));
            }
        }
        // line-line intersections
        for i in 0..cons.len() {
            for j in (i + 1)..cons.len() {
                let det = cons[i].u * cons[j].v - cons[j].u * cons[i].v;
                if det.abs() < 1e-14 {
                    continue;
                }
                let u = (slack[i] * cons[j].v - slack[j] * cons[i].v) / det;
                let v = (cons[i].u * slack[j] - cons[j].u * slack[i]) / det;
                cands.push((u, v));
            }
        }
        let mut best = None;
        for (u, v) in cands {
            if feasible(u, v) {
                let val = obj.base_a * a + obj.base_b * b + obj.u * u + obj.v * v;
                best = Some(best.map_or(val, |cur: f64| cur.min(val)));
            }
        }
        best
    };

    // dense sweep, then zoom the best few basins independently
    let dense = 161usize;
    let mut seeds: Vec<(f64, [f64; 2])> = Vec::new();
    for ia in 0..dense {
        let a = trace_cap * ia as f64 / (dense - 1) as f64;
        for ib in 0..dense {
            let b = trace_cap * ib as f64 / (dense - 1) as f64;
            if let Some(val) = solve_disc(a, b) {
                seeds.push((val, [a, b]));
            }
        }
    }
    seeds.sort_by(|x, y| x.0.total_cmp(&y.0));
    let cell0 = trace_cap / (dense - 1) as f64;
    let mut picked: Vec<[f64; 2]> = Vec::new();
    for (_, pt) in &seeds {
        if picked
            .iter()
            .all(|q| (q[0] - pt[0]).abs() > 3.0 * cell0 || (q[1] - pt[1]).abs() > 3.0 * cell0)
        {
            picked.push(*pt);
        }
        if picked.len() == 5 {
            break;
        }
    }

    let mut best = f64::INFINITY;
    for start_pt in picked {
        let mut lo = [
            (start_pt[0] - 2.0 * cell0).max(0.0),
            (start_pt[1] - 2.0 * cell0).max(0.0),
        ];
        let mut hi = [start_pt[0] + 2.0 * cell0, start_pt[1] + 2.0 * cell0];
        let mut best_pt = start_pt;
        for _ in 0..passes {
            for ia in 0..grid {
                let a = lo[0] + (hi[0] - lo[0]) * ia as f64 / (grid - 1) as f64;
                for ib in 0..grid {
                    let b = lo[1] + (hi[1] - lo[1]) * ib as f64 / (grid - 1) as f64;
                    if let Some(val) = solve_disc(a, b) {
                        if val < best {
                            best = val;
                            best_pt = [a, b];
                        }
                    }
                }
            }
            for i in 0..2 {
                let span = (hi[i] - lo[i]) / (grid - 1) as f64 * 4.0;
                lo[i] = (best_pt[i] - span).max(0.0);
                hi[i] = best_pt[i] + span;
            }
        }
    }
    best
}

#[test]
fn random_2x2_matches_primal_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..5 {
        let p = random_instance(2, 1, &mut rng);
        let sol = solve_sdp(&p, 1e-9, 100).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let oracle = primal_grid_2x2(&p, 16, 21);
        assert!(
            (sol.objective - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
            "trial {trial}: solver {} vs grid {}",
            sol.objective,
            oracle
        );
    }
}

#[test]
fn equality_constrained_multiblock() {
    // two blocks, weighted trace equality, per-block voltage-style rows:
    // exercise the problem shape of the hardened max-min relaxation
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let a1 = random_hermitian(3, &mut rng);
    let a2 = random_hermitian(3, &mut rng);
    let p = SdpProblem {
        block_dims: vec![3, 3, 1],
        objective: vec![(2, CxMat::scaled_identity(1, -1.0))],
        constraints: vec![
            Constraint {
                coeffs: vec![(0, a1.clone()), (2, CxMat::identity(1))],
                sense: Sense::Le,
                rhs: 0.0,
            },
            Constraint {
                coeffs: vec![(1, a2.clone()), (2, CxMat::identity(1))],
                sense: Sense::Le,
                rhs: 0.0,
            },
            Constraint {
                coeffs: vec![
                    (0, CxMat::scaled_identity(3, 0.7)),
                    (1, CxMat::scaled_identity(3, 1.3)),
                ],
                sense: Sense::Eq,
                rhs: 1.0,
            },
        ],
    };
    let sol = solve_sdp(&p, 1e-8, 150).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    // equality holds tightly
    let lhs = 0.7 * sol.blocks[0].trace().re + 1.3 * sol.blocks[1].trace().re;
    assert!((lhs - 1.0).abs() < 1e-7);
    // gamma equals the binding min of the two rows
    let gamma = sol.blocks[2][(0, 0)].re;
    let r1 = -a1.trace_product_re(&sol.blocks[0]);
    let r2 = -a2.trace_product_re(&sol.blocks[1]);
    assert!(gamma <= r1.min(r2) + 1e-6);
    assert!((gamma - r1.min(r2)).abs() < 1e-5);
}

#[test]
fn weak_duality_along_feasible_iterates() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let p = random_instance(4, 2, &mut rng);
    let sol = solve_sdp(&p, 1e-9, 100).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    let mut checked = 0;
    for it in &sol.iterates {
        if it.primal_residual <= 1e-8 && it.dual_residual <= 1e-8 {
            let slack = 1e-7 * (1.0 + it.primal_obj.abs() + it.dual_obj.abs());
            assert!(
                it.primal_obj >= it.dual_obj - slack,
                "weak duality violated: {} < {}",
                it.primal_obj,
                it.dual_obj
            );
            checked += 1;
        }
    }
    assert!(checked > 0, "no iterate reached joint feasibility");
}

#[test]
fn infeasible_problem_is_certified() {
    let p = SdpProblem {
        block_dims: vec![2],
        objective: vec![(0, CxMat::identity(2))],
        constraints: vec![Constraint {
            coeffs: vec![(0, CxMat::identity(2))],
            sense: Sense::Le,
            rhs: -1.0,
        }],
    };
    let sol = solve_sdp(&p, 1e-7, 120).unwrap();
    assert_eq!(sol.status, SdpStatus::Infeasible);
}
