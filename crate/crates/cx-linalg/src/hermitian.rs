//! Hermitian eigendecomposition and derived operations.
//!
//! The solver reduces a complex Hermitian matrix to real symmetric
//! tridiagonal form with Householder reflectors, then runs implicit-shift
//! QL sweeps while accumulating the unitary transform. Eigenvalues come
//! back sorted ascending; each eigenvector's phase is canonicalized so the
//! first component above 1e-12 in magnitude is real and positive, which
//! makes the whole decomposition a pure function of the input bytes.

use num_complex::Complex64;

use crate::error::CxLinalgError;
use crate::mat::{cdot, vnorm, CxMat};

/// Threshold below which a vector component is treated as zero when
/// picking the phase-canonicalization anchor. Eigenvectors have unit
/// norm, so the largest component is at least `1/sqrt(n)` and an anchor
/// always exists.
const PHASE_ANCHOR_TOL: f64 = 1e-12;

/// Relative eigenvalue gap below which an extreme eigenvector is flagged
/// as degenerate (the minimizer is not uniquely attained).
const DEGENERACY_REL_GAP: f64 = 1e-10;

/// Complex matrix with conjugate symmetry enforced on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: CxMat,
}

impl HermitianMatrix {
    /// Build from row-major entries, averaging `(A + A^H)/2` so the
    /// stored matrix is exactly conjugate-symmetric.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, CxLinalgError> {
        if dim == 0 {
            return Err(CxLinalgError::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(CxLinalgError::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::from_mat(&CxMat::from_vec(dim, dim, entries))
    }

    /// Symmetrize an arbitrary square matrix.
    pub fn from_mat(m: &CxMat) -> Result<Self, CxLinalgError> {
        if m.rows() != m.cols() {
            return Err(CxLinalgError::DimensionMismatch {
                expected: m.rows(),
                got: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(CxLinalgError::EmptyMatrix);
        }
        if !m.is_finite() {
            return Err(CxLinalgError::NonFinite);
        }
        Ok(Self {
            mat: m.hermitian_part(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn as_mat(&self) -> &CxMat {
        &self.mat
    }

    pub fn into_mat(self) -> CxMat {
        self.mat
    }

    pub fn trace_re(&self) -> f64 {
        self.mat.trace().re
    }
}

/// Result of `herm_eig`: eigenvalues ascending, unitary eigenvector
/// matrix with column `i` paired to eigenvalue `i`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CxMat,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i)
    }

    /// `U diag(f(lambda)) U^H`, Hermitian by construction.
    pub fn assemble(&self, mut f: impl FnMut(f64) -> f64) -> CxMat {
        let n = self.dim();
        let mut out = CxMat::zeros(n, n);
        for i in 0..n {
            let v = self.eigenvector(i);
            let w = f(self.eigenvalues[i]);
            if w == 0.0 {
                continue;
            }
            let rank1 = CxMat::outer(&v, &v);
            out.add_assign_scaled(&rank1, Complex64::new(w, 0.0));
        }
        out.hermitian_part()
    }

    /// Relative gap between the two smallest eigenvalues.
    fn low_gap(&self) -> f64 {
        if self.dim() < 2 {
            return f64::INFINITY;
        }
        (self.eigenvalues[1] - self.eigenvalues[0]) / self.spectrum_scale()
    }

    fn high_gap(&self) -> f64 {
        let n = self.dim();
        if n < 2 {
            return f64::INFINITY;
        }
        (self.eigenvalues[n - 1] - self.eigenvalues[n - 2]) / self.spectrum_scale()
    }

    fn spectrum_scale(&self) -> f64 {
        let n = self.dim();
        self.eigenvalues[0]
            .abs()
            .max(self.eigenvalues[n - 1].abs())
            .max(f64::MIN_POSITIVE)
    }
}

/// Extreme eigenvector together with its eigenvalue and a flag recording
/// whether the extreme eigenvalue was (numerically) degenerate.
#[derive(Debug, Clone)]
pub struct ExtremeEigvec {
    pub vector: Vec<Complex64>,
    pub value: f64,
    pub degenerate: bool,
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn herm_eig(a: &HermitianMatrix) -> Result<EigenDecomposition, CxLinalgError> {
    let n = a.dim();
    let (mut d, mut e, mut q) = tridiagonalize(a.as_mat());
    tql_implicit(&mut d, &mut e, &mut q)?;

    // ascending order; stable sort keeps the QL output order on exact ties
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let mut eigenvectors = CxMat::zeros(n, n);
    for (new_col, &old_col) in idx.iter().enumerate() {
        let mut v = q.column(old_col);
        canonicalize_phase(&mut v);
        eigenvectors.set_column(new_col, &v);
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Unit eigenvector of the smallest eigenvalue.
pub fn min_eigvec(a: &HermitianMatrix) -> Result<ExtremeEigvec, CxLinalgError> {
    let eig = herm_eig(a)?;
    Ok(ExtremeEigvec {
        vector: eig.eigenvector(0),
        value: eig.eigenvalues[0],
        degenerate: eig.low_gap() <= DEGENERACY_REL_GAP,
    })
}

/// Unit eigenvector of the largest eigenvalue.
pub fn dominant_eigvec(a: &HermitianMatrix) -> Result<ExtremeEigvec, CxLinalgError> {
    let eig = herm_eig(a)?;
    let n = eig.dim();
    Ok(ExtremeEigvec {
        vector: eig.eigenvector(n - 1),
        value: eig.eigenvalues[n - 1],
        degenerate: eig.high_gap() <= DEGENERACY_REL_GAP,
    })
}

/// Hermitian square root of a (numerically) PSD matrix. Eigenvalues down
/// to `-1e-10 * ||X||_F` are clamped to zero; anything lower is rejected.
pub fn psd_sqrt(x: &HermitianMatrix) -> Result<HermitianMatrix, CxLinalgError> {
    let eig = herm_eig(x)?;
    let clamp = -1e-10 * x.as_mat().frobenius_norm();
    if let Some(&lambda) = eig
        .eigenvalues
        .iter()
        .find(|&&lambda| lambda < clamp)
    {
        return Err(CxLinalgError::NotPsd {
            eigenvalue: lambda,
            threshold: clamp,
        });
    }
    let root = eig.assemble(|lambda| lambda.max(0.0).sqrt());
    HermitianMatrix::from_mat(&root)
}

/// Rotate `v` so its first component with magnitude above the anchor
/// tolerance is real and positive.
pub fn canonicalize_phase(v: &mut [Complex64]) {
    let anchor = v.iter().find(|z| z.norm() > PHASE_ANCHOR_TOL);
    if let Some(&z) = anchor {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Householder reduction of a Hermitian matrix to real symmetric
/// tridiagonal form. Returns the diagonal `d`, the subdiagonal `e`
/// (`e[i]` couples `i` and `i+1`; `e[n-1]` is a zero sentinel) and the
/// accumulated unitary `Q` with `Q^H A Q` tridiagonal.
fn tridiagonalize(a: &CxMat) -> (Vec<f64>, Vec<f64>, CxMat) {
    let n = a.rows();
    let mut work = a.clone();
    let mut q = CxMat::identity(n);

    for k in 0..n.saturating_sub(2) {
        // column below the diagonal
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for i in (k + 1)..n {
            x[i] = work[(i, k)];
        }
        let xnorm = vnorm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[k + 1];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[k + 1] -= alpha;
        let vn = vnorm(&v);
        if vn < f64::EPSILON * xnorm {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }

        // A <- P A P with P = I - 2 v v^H
        let y = work.matvec(&v);
        let beta = cdot(&v, &y).re;
        for i in 0..n {
            for j in 0..n {
                let upd = v[i] * y[j].conj() + y[i] * v[j].conj();
                work[(i, j)] += -2.0 * upd + 4.0 * beta * (v[i] * v[j].conj());
            }
        }
        // Q <- Q P
        let z = q.matvec(&v);
        for i in 0..n {
            for j in 0..n {
                let upd = z[i] * v[j].conj();
                q[(i, j)] -= 2.0 * upd;
            }
        }
    }

    // phase-rotate the subdiagonal to the nonnegative real axis
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut phi = vec![Complex64::new(1.0, 0.0); n];
    for i in 0..n {
        d[i] = work[(i, i)].re;
    }
    // subdiagonal of (Q D)^H A (Q D) is conj(phi[i+1]) * t_i * phi[i]
    for i in 0..n.saturating_sub(1) {
        let t = work[(i + 1, i)];
        let mag = t.norm();
        e[i] = mag;
        phi[i + 1] = if mag > 0.0 { phi[i] * (t / mag) } else { phi[i] };
    }
    for j in 0..n {
        let p = phi[j];
        for i in 0..n {
            q[(i, j)] *= p;
        }
    }
    (d, e, q)
}

/// Implicit-shift QL sweeps on a real symmetric tridiagonal matrix,
/// accumulating the rotations into the complex column basis `z`.
fn tql_implicit(d: &mut [f64], e: &mut [f64], z: &mut CxMat) -> Result<(), CxLinalgError> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    const MAX_SWEEPS: usize = 64;

    // absolute deflation floor scaled to the matrix norm: rank-deficient
    // inputs produce clusters where diagonal and coupling entries are
    // both roundoff-sized, so the relative split test cannot trigger;
    // deflating couplings below eps*anorm is a backward-stable cut
    let anorm = d
        .iter()
        .map(|v| v.abs())
        .chain(e.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max);
    let floor = f64::EPSILON * anorm;

    for l in 0..n {
        let mut iter = 0usize;
        'restart: loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    e[m] = 0.0;
                    break;
                }
                m += 1;
            }
            if m == l {
                break 'restart;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(CxLinalgError::NoConvergence(MAX_SWEEPS));
            }

            // Wilkinson shift
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // deflate and restart the sweep
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    continue 'restart;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                for k in 0..n {
                    let zk1 = z[(k, i + 1)];
                    let zk0 = z[(k, i)];
                    z[(k, i + 1)] = zk0.scale(s) + zk1.scale(c);
                    z[(k, i)] = zk0.scale(c) - zk1.scale(s);
                }
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn herm_from_rows(rows: &[&[Complex64]]) -> HermitianMatrix {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            data.extend_from_slice(r);
        }
        HermitianMatrix::new(n, data).unwrap()
    }

    #[test]
    fn diagonal_matrix() {
        let a = herm_from_rows(&[&[c(3.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-2.0, 0.0)]]);
        let eig = herm_eig(&a).unwrap();
        assert!((eig.eigenvalues[0] + 2.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 3.0).abs() < 1e-14);
        // eigenvector of -2 is e2, of 3 is e1, with canonical positive phase
        assert!((eig.eigenvectors[(1, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((eig.eigenvectors[(0, 1)] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn exchange_matrix() {
        let a = herm_from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        let eig = herm_eig(&a).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = eig.eigenvector(0);
        let v1 = eig.eigenvector(1);
        assert!((v0[0].re - s).abs() < 1e-12 && (v0[1].re + s).abs() < 1e-12);
        assert!((v1[0].re - s).abs() < 1e-12 && (v1[1].re - s).abs() < 1e-12);
    }

    #[test]
    fn min_eigvec_diagonal() {
        let a = herm_from_rows(&[&[c(3.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-2.0, 0.0)]]);
        let ev = min_eigvec(&a).unwrap();
        assert!((ev.value + 2.0).abs() < 1e-14);
        assert!((ev.vector[1] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(!ev.degenerate);
    }

    #[test]
    fn min_eigvec_flags_full_degeneracy() {
        let a = herm_from_rows(&[&[c(-1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-1.0, 0.0)]]);
        let ev = min_eigvec(&a).unwrap();
        assert!(ev.degenerate);
        assert!((ev.vector[0] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn dominant_eigvec_rank_one() {
        // conj(h) conj(h)^H has dominant eigenvector conj(h)/||h|| up to phase canon
        let h = [c(1.0, 0.5), c(-0.3, 0.2), c(0.7, -1.1)];
        let hc: Vec<Complex64> = h.iter().map(|z| z.conj()).collect();
        let m = CxMat::outer(&hc, &hc);
        let a = HermitianMatrix::from_mat(&m).unwrap();
        let ev = dominant_eigvec(&a).unwrap();
        let mut expect = hc.clone();
        let norm = vnorm(&expect);
        for z in expect.iter_mut() {
            *z /= norm;
        }
        canonicalize_phase(&mut expect);
        for (a, b) in ev.vector.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn psd_sqrt_diagonal() {
        let a = herm_from_rows(&[&[c(4.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(9.0, 0.0)]]);
        let r = psd_sqrt(&a).unwrap();
        assert!((r.as_mat()[(0, 0)].re - 2.0).abs() < 1e-12);
        assert!((r.as_mat()[(1, 1)].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn psd_sqrt_identity() {
        let a = HermitianMatrix::from_mat(&CxMat::identity(4)).unwrap();
        let r = psd_sqrt(&a).unwrap();
        let diff = r.as_mat().sub(&CxMat::identity(4));
        assert!(diff.frobenius_norm() < 1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let a = herm_from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-1.0, 0.0)]]);
        assert!(matches!(psd_sqrt(&a), Err(CxLinalgError::NotPsd { .. })));
    }

    #[test]
    fn rejects_non_finite() {
        let m = CxMat::from_vec(
            1,
            1,
            vec![c(f64::NAN, 0.0)],
        );
        assert!(matches!(
            HermitianMatrix::from_mat(&m),
            Err(CxLinalgError::NonFinite)
        ));
    }

    #[test]
    fn one_by_one() {
        let a = HermitianMatrix::new(1, vec![c(5.0, 0.0)]).unwrap();
        let eig = herm_eig(&a).unwrap();
        assert_eq!(eig.eigenvalues, vec![5.0]);
        let ev = min_eigvec(&a).unwrap();
        assert!(!ev.degenerate);
    }
}
