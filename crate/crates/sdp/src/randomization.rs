//! Randomization primitives for recovering rank-1 solutions from
//! high-rank PSD matrices.

use cx_linalg::{herm_eig, Complex64, HermitianMatrix};
use rand::Rng;

use crate::error::SdpError;

/// Unit-modulus vector `v` with `v^H Q v = Tr{Q}` for Hermitian `Q`.
///
/// Sweeping i = 2..r, the phase of `v_i` is chosen so the accumulated
/// cross term `sum_{k<i} conj(v_k) Q_{k,i}` contributes zero real part;
/// the diagonal then carries exactly the trace. When the cross term
/// vanishes the phase is a free degree of freedom and is drawn from the
/// provided stream.
pub fn rank1_preserving_vector<R: Rng>(q: &HermitianMatrix, rng: &mut R) -> Vec<Complex64> {
    let r = q.dim();
    let qm = q.as_mat();
    let mut v = vec![Complex64::new(1.0, 0.0); r];
    for i in 1..r {
        let mut cross = Complex64::new(0.0, 0.0);
        for k in 0..i {
            cross += v[k].conj() * qm[(k, i)];
        }
        let theta = if cross.norm() > 0.0 {
            std::f64::consts::FRAC_PI_2 - cross.arg()
        } else {
            rng.gen_range(0.0..std::f64::consts::TAU)
        };
        v[i] = Complex64::from_polar(1.0, theta);
    }
    v
}

/// Gaussian-free randomization candidates: `x_t = U Sigma^{1/2} v_t`
/// with unit-modulus uniformly-phased `v_t` (so `E{v v^H} = I`). Every
/// candidate satisfies `||x_t||^2 = Tr{X}` exactly, hence inherits the
/// trace bound of `X` by construction.
pub fn randomize_gaussian_rank1<R: Rng>(
    x: &HermitianMatrix,
    t_count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Complex64>>, SdpError> {
    if t_count == 0 {
        return Err(SdpError::ZeroCandidates);
    }
    let n = x.dim();
    let eig = herm_eig(x)?;
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let mut out = Vec::with_capacity(t_count);
    for _ in 0..t_count {
        let mut cand = vec![Complex64::new(0.0, 0.0); n];
        for (i, &root) in roots.iter().enumerate() {
            if root == 0.0 {
                // burn a draw so candidate streams stay aligned across
                // matrices of equal size
                let _: f64 = rng.gen();
                continue;
            }
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let coeff = Complex64::from_polar(root, phase);
            let u = eig.eigenvector(i);
            for (c, uu) in cand.iter_mut().zip(&u) {
                *c += coeff * uu;
            }
        }
        out.push(cand);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cx_linalg::{cdot, vnorm_sq, CxMat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let raw = CxMat::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        HermitianMatrix::from_mat(&raw).unwrap()
    }

    #[test]
    fn diagonal_q_trace_identity_exact() {
        let q = HermitianMatrix::new(
            3,
            vec![
                c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0),
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = rank1_preserving_vector(&q, &mut rng);
        for z in &v {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        let qv = q.as_mat().matvec(&v);
        let form = cdot(&v, &qv);
        assert!((form.re - 1.5).abs() < 1e-12);
        assert!(form.im.abs() < 1e-12);
    }

    #[test]
    fn two_by_two_hand_solution() {
        // Q = [[1, c],[conj(c), 2]]: v = (1, e^{j t}) with Re{c e^{j t}} = 0
        let cc = c(0.3, -0.8);
        let q = HermitianMatrix::new(2, vec![c(1.0, 0.0), cc, cc.conj(), c(2.0, 0.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = rank1_preserving_vector(&q, &mut rng);
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-15);
        let zeroed = (cc * v[1]).re;
        assert!(zeroed.abs() < 1e-12);
        let form = cdot(&v, &q.as_mat().matvec(&v));
        assert!((form.re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn random_q_trace_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = random_hermitian(5, &mut rng);
            let v = rank1_preserving_vector(&q, &mut rng);
            let form = cdot(&v, &q.as_mat().matvec(&v));
            let tr = q.trace_re();
            assert!(
                (form.re - tr).abs() <= 1e-9 * (1.0 + q.as_mat().frobenius_norm()),
                "form {} vs trace {}",
                form.re,
                tr
            );
            for z in &v {
                assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rank1_input_returns_same_vector_up_to_phase() {
        let x: Vec<Complex64> = vec![c(1.0, 0.5), c(-0.2, 0.1), c(0.4, -0.7)];
        let gram = CxMat::outer(&x, &x);
        let h = HermitianMatrix::from_mat(&gram).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cands = randomize_gaussian_rank1(&h, 5, &mut rng).unwrap();
        for cand in cands {
            // |<cand, x>| = ||cand|| ||x|| when parallel
            let ip = cdot(&cand, &x).norm();
            let prod = vnorm_sq(&cand).sqrt() * vnorm_sq(&x).sqrt();
            assert!((ip - prod).abs() < 1e-9 * prod);
        }
    }

    #[test]
    fn candidates_deterministic_for_fixed_seed() {
        let mut rng1 = ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let mut gen_rng = ChaCha8Rng::seed_from_u64(8);
        let q = random_hermitian(4, &mut gen_rng);
        let x = {
            // PSD: square it
            let m = q.as_mat().matmul(q.as_mat());
            HermitianMatrix::from_mat(&m).unwrap()
        };
        let a = randomize_gaussian_rank1(&x, 1, &mut rng1).unwrap();
        let b = randomize_gaussian_rank1(&x, 1, &mut rng2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn candidate_energy_equals_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_hermitian(4, &mut rng);
        let x = HermitianMatrix::from_mat(&q.as_mat().matmul(q.as_mat())).unwrap();
        let tr = x.trace_re();
        let cands = randomize_gaussian_rank1(&x, 50, &mut rng).unwrap();
        for cand in cands {
            assert!(vnorm_sq(&cand) <= tr * (1.0 + 1e-9));
            assert!((vnorm_sq(&cand) - tr).abs() <= 1e-9 * tr);
        }
    }

    #[test]
    fn second_moment_recovers_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let q = random_hermitian(3, &mut rng);
        let x = HermitianMatrix::from_mat(&q.as_mat().matmul(q.as_mat())).unwrap();
        let t = 1000;
        let cands = randomize_gaussian_rank1(&x, t, &mut rng).unwrap();
        let mut acc = CxMat::zeros(3, 3);
        for cand in &cands {
            acc = acc.add(&CxMat::outer(cand, cand));
        }
        let mean = acc.scale_re(1.0 / t as f64);
        let rel = mean.sub(x.as_mat()).frobenius_norm() / x.as_mat().frobenius_norm();
        assert!(rel < 0.10, "second moment off by {rel:.3}");
    }

    #[test]
    fn zero_count_rejected() {
        let x = HermitianMatrix::from_mat(&CxMat::identity(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!(matches!(
            randomize_gaussian_rank1(&x, 0, &mut rng),
            Err(SdpError::ZeroCandidates)
        ));
    }
}
