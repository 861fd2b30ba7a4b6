//! Dense row-major complex matrix with the handful of operations the
//! waveform optimizers need. No sparsity, no views; sizes stay small
//! (tens of rows), so clarity wins over cleverness.

use num_complex::Complex64;

use crate::error::CxLinalgError;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CxMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CxMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Scalar-on-the-diagonal matrix `c * I`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(c, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "storage length mismatch");
        Self { rows, cols, data }
    }

    /// Outer product `u v^H`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for i in 0..u.len() {
            for j in 0..v.len() {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self::from_vec(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_vec(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        Self::from_vec(self.rows, self.cols, data)
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: Complex64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(A + A^H)/2`, exact for already-Hermitian input up to rounding.
    pub fn hermitian_part(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `Tr{A B}` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Real part of `Tr{A B}`; the value is exactly real when both
    /// factors are Hermitian.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                let b = other[(k, i)];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    /// Quadratic form `v^H A v` (complex in general).
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        let av = self.matvec(v);
        cdot(v, &av)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Cholesky factor `L` with `L L^H = A` for Hermitian positive
    /// definite input. Fails on a non-positive pivot.
    pub fn cholesky(&self) -> Result<CxMat, CxLinalgError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = CxMat::zeros(n, n);
        for j in 0..n {
            let mut diag = self[(j, j)].re;
            for k in 0..j {
                diag -= l[(j, k)].norm_sqr();
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(CxLinalgError::NotPositiveDefinite {
                    pivot: diag,
                    index: j,
                });
            }
            let djj = diag.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// Solve `L x = b` for lower-triangular `L` (forward substitution).
    pub fn solve_lower(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.rows;
        let mut x = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self[(i, k)];
                x[i] = x[i] - lik * x[k];
            }
            x[i] /= self[(i, i)];
        }
        x
    }

    /// Solve `L^H x = b` for lower-triangular `L` (back substitution on
    /// the adjoint).
    pub fn solve_lower_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.rows;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let lki = self[(k, i)].conj();
                x[i] = x[i] - lki * x[k];
            }
            x[i] /= self[(i, i)].conj();
        }
        x
    }

    /// Inverse of a Hermitian positive definite matrix via Cholesky.
    pub fn hpd_inverse(&self) -> Result<CxMat, CxLinalgError> {
        let n = self.rows;
        let l = self.cholesky()?;
        let mut inv = CxMat::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            let y = l.solve_lower(&e);
            let x = l.solve_lower_adjoint(&y);
            inv.set_column(j, &x);
            e[j] = Complex64::new(0.0, 0.0);
        }
        // clean up rounding so downstream Hermitian assumptions hold
        Ok(inv.hermitian_part())
    }

    /// Solve `A x = b` by LU with partial pivoting.
    pub fn lu_solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, CxLinalgError> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[(col, col)].norm_sqr();
            for r in (col + 1)..n {
                let m = a[(r, col)].norm_sqr();
                if m > best {
                    best = m;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Err(CxLinalgError::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a[(col, j)];
                    a[(col, j)] = a[(pivot, j)];
                    a[(pivot, j)] = tmp;
                }
                x.swap(col, pivot);
            }
            let d = a[(col, col)];
            for r in (col + 1)..n {
                let factor = a[(r, col)] / d;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= factor * v;
                }
                x[r] = x[r] - factor * x[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= a[(i, j)] * x[j];
            }
            x[i] = s / a[(i, i)];
        }
        Ok(x)
    }
}

impl std::ops::Index<(usize, usize)> for CxMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CxMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Inner product `a^H b`.
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Squared Euclidean norm.
pub fn vnorm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_identity() {
        let a = CxMat::from_fn(3, 3, |i, j| c((i + j) as f64, (i as f64) - (j as f64)));
        let id = CxMat::identity(3);
        assert_eq!(a.matmul(&id), a);
    }

    #[test]
    fn adjoint_involution() {
        let a = CxMat::from_fn(2, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn cholesky_reconstructs() {
        // A = B B^H + I is Hermitian positive definite
        let b = CxMat::from_fn(3, 3, |i, j| c((i * 3 + j) as f64 * 0.1, (j as f64) * 0.2));
        let a = b.matmul(&b.adjoint()).add(&CxMat::identity(3));
        let l = a.cholesky().unwrap();
        let diff = l.matmul(&l.adjoint()).sub(&a);
        assert!(diff.frobenius_norm() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = CxMat::identity(2);
        a[(1, 1)] = c(-1.0, 0.0);
        assert!(a.cholesky().is_err());
    }

    #[test]
    fn lu_solve_roundtrip() {
        let a = CxMat::from_fn(4, 4, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 + if i == j { 4.0 } else { 0.0 }, (i as f64 - j as f64) * 0.3)
        });
        let x_true: Vec<Complex64> = (0..4).map(|i| c(i as f64, -(i as f64) * 0.5)).collect();
        let b = a.matvec(&x_true);
        let x = a.lu_solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-10);
        }
    }

    #[test]
    fn hpd_inverse_roundtrip() {
        let b = CxMat::from_fn(3, 3, |i, j| c((i + 2 * j) as f64 * 0.3, (i as f64) * 0.1));
        let a = b.matmul(&b.adjoint()).add(&CxMat::identity(3));
        let inv = a.hpd_inverse().unwrap();
        let diff = a.matmul(&inv).sub(&CxMat::identity(3));
        assert!(diff.frobenius_norm() < 1e-10);
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = CxMat::from_fn(3, 3, |i, j| c(i as f64, j as f64)).hermitian_part();
        let b = CxMat::from_fn(3, 3, |i, j| c((i * j) as f64, i as f64 - j as f64)).hermitian_part();
        let direct = a.matmul(&b).trace();
        assert!((a.trace_product_re(&b) - direct.re).abs() < 1e-12);
        assert!(direct.im.abs() < 1e-12);
    }
}
