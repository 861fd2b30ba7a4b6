//! Masked coupling matrices.
//!
//! The full coupling matrix of user `q` is the rank-1 outer product
//! `M_q = conj(h_q) h_q^T`. The quartic voltage model only ever touches
//! its block diagonals: mask `k` keeps the M-by-M blocks at block
//! coordinates `(t, t+k)` and zeroes everything else. Masks for negative
//! `k` are the adjoints of the positive ones, and the signed family sums
//! back to `M_q` exactly because the masks partition the entries.
//!
//! The frequency-domain variants shrink the same structure to N-by-N:
//! per-tone channel norms (single-user), effective channels after fixed
//! spatial beamforming (multi-user), and the all-ones masks of the
//! channel-hardened asymptotic model.

use cx_linalg::{Complex64, CxMat};

use crate::error::RectennaError;

/// Common access to a family of k-th (block-)diagonal masks.
pub trait MaskedCoupling {
    /// Matrix side length.
    fn dim(&self) -> usize;
    /// Number of tones, i.e. number of nonnegative mask indices.
    fn n_tones(&self) -> usize;
    /// Mask for `k >= 0`.
    fn mask(&self, k: usize) -> &CxMat;
}

/// Block-diagonal masks of `M_q = conj(h_q) h_q^T` at M-by-M granularity.
#[derive(Debug, Clone)]
pub struct CouplingMatrices {
    m: usize,
    n: usize,
    masks: Vec<CxMat>,
}

/// Build the masked family from a stacked frequency-major channel row.
pub fn build_coupling(h: &[Complex64], m: usize, n: usize) -> Result<CouplingMatrices, RectennaError> {
    if m == 0 || n == 0 || h.len() != m * n {
        return Err(RectennaError::BadLayout { len: h.len(), m, n });
    }
    let dim = m * n;
    let mut masks = Vec::with_capacity(n);
    for k in 0..n {
        let mut mask = CxMat::zeros(dim, dim);
        for t in 0..(n - k) {
            let (row0, col0) = (t * m, (t + k) * m);
            for i in 0..m {
                for j in 0..m {
                    // entry (i,j) of M_q is conj(h_i) h_j
                    mask[(row0 + i, col0 + j)] = h[row0 + i].conj() * h[col0 + j];
                }
            }
        }
        masks.push(mask);
    }
    Ok(CouplingMatrices { m, n, masks })
}

impl CouplingMatrices {
    pub fn antennas(&self) -> usize {
        self.m
    }

    /// Signed-index mask; negative `k` returns the adjoint of mask `|k|`.
    pub fn mask_signed(&self, k: i64) -> CxMat {
        if k >= 0 {
            self.masks[k as usize].clone()
        } else {
            self.masks[(-k) as usize].adjoint()
        }
    }

    /// Reassemble the full `M_q` from the signed mask family.
    pub fn reassemble(&self) -> CxMat {
        let dim = self.m * self.n;
        let mut full = CxMat::zeros(dim, dim);
        for k in -(self.n as i64 - 1)..=(self.n as i64 - 1) {
            full = full.add(&self.mask_signed(k));
        }
        full
    }
}

impl MaskedCoupling for CouplingMatrices {
    fn dim(&self) -> usize {
        self.m * self.n
    }

    fn n_tones(&self) -> usize {
        self.n
    }

    fn mask(&self, k: usize) -> &CxMat {
        &self.masks[k]
    }
}

/// Which N-by-N coupling family a `FreqCouplingMatrices` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqVariant {
    /// From the per-tone channel norms (single-user MRT reduction).
    Norm,
    /// From effective channels after fixed per-tone spatial beamforming.
    Effective,
    /// All-ones diagonals of the channel-hardened asymptotic model.
    Asymptotic,
}

/// N-by-N masked diagonals for the frequency-domain problems.
#[derive(Debug, Clone)]
pub struct FreqCouplingMatrices {
    n: usize,
    variant: FreqVariant,
    masks: Vec<CxMat>,
}

impl FreqCouplingMatrices {
    /// Masks of `h_norm h_norm^T` where `h_norm` stacks the per-tone
    /// spatial channel norms of a frequency-major channel row.
    pub fn norm_from_channel(h: &[Complex64], m: usize, n: usize) -> Result<Self, RectennaError> {
        if m == 0 || n == 0 || h.len() != m * n {
            return Err(RectennaError::BadLayout { len: h.len(), m, n });
        }
        let h_norm: Vec<f64> = (0..n)
            .map(|t| {
                h[t * m..(t + 1) * m]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        Ok(Self::from_h_norm(&h_norm))
    }

    /// Masks of `h_norm h_norm^T` for a real nonnegative gain vector.
    pub fn from_h_norm(h_norm: &[f64]) -> Self {
        let h: Vec<Complex64> = h_norm.iter().map(|&g| Complex64::new(g, 0.0)).collect();
        Self {
            n: h.len(),
            variant: FreqVariant::Norm,
            masks: diag_masks(&h, |hi, hj| hi * hj),
        }
    }

    /// Masks of `h_e h_e^H` for an effective channel vector.
    pub fn effective(h_e: &[Complex64]) -> Self {
        Self {
            n: h_e.len(),
            variant: FreqVariant::Effective,
            masks: diag_masks(h_e, |hi, hj| hi * hj.conj()),
        }
    }

    /// Masks with ones on the k-th diagonal; mask 0 is the identity.
    pub fn asymptotic(n: usize) -> Self {
        let ones = vec![Complex64::new(1.0, 0.0); n];
        Self {
            n,
            variant: FreqVariant::Asymptotic,
            masks: diag_masks(&ones, |_, _| Complex64::new(1.0, 0.0)),
        }
    }

    pub fn variant(&self) -> FreqVariant {
        self.variant
    }

    pub fn mask_signed(&self, k: i64) -> CxMat {
        if k >= 0 {
            self.masks[k as usize].clone()
        } else {
            self.masks[(-k) as usize].adjoint()
        }
    }

    pub fn reassemble(&self) -> CxMat {
        let mut full = CxMat::zeros(self.n, self.n);
        for k in -(self.n as i64 - 1)..=(self.n as i64 - 1) {
            full = full.add(&self.mask_signed(k));
        }
        full
    }
}

impl MaskedCoupling for FreqCouplingMatrices {
    fn dim(&self) -> usize {
        self.n
    }

    fn n_tones(&self) -> usize {
        self.n
    }

    fn mask(&self, k: usize) -> &CxMat {
        &self.masks[k]
    }
}

fn diag_masks(
    h: &[Complex64],
    entry: impl Fn(Complex64, Complex64) -> Complex64,
) -> Vec<CxMat> {
    let n = h.len();
    let mut masks = Vec::with_capacity(n);
    for k in 0..n {
        let mut mask = CxMat::zeros(n, n);
        for t in 0..(n - k) {
            mask[(t, t + k)] = entry(h[t], h[t + k]);
        }
        masks.push(mask);
    }
    masks
}

#[cfg(test)]
mod tests {
    use super::*;
    use cx_linalg::{herm_eig, HermitianMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hand_expanded_two_tone_mask() {
        // M=1, N=2, h=(1,1): mask 1 keeps only the (0,1) entry
        let coupling = build_coupling(&[c(1.0, 0.0), c(1.0, 0.0)], 1, 2).unwrap();
        let m1 = coupling.mask(1);
        assert_eq!(m1[(0, 1)], c(1.0, 0.0));
        assert_eq!(m1[(0, 0)], c(0.0, 0.0));
        assert_eq!(m1[(1, 0)], c(0.0, 0.0));
        assert_eq!(m1[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn masks_partition_full_outer_product() {
        let h: Vec<Complex64> = (0..6)
            .map(|i| c(0.3 * i as f64 - 0.7, 0.2 * i as f64))
            .collect();
        let coupling = build_coupling(&h, 2, 3).unwrap();
        let full = coupling.reassemble();
        let hc: Vec<Complex64> = h.iter().map(|z| z.conj()).collect();
        let outer = CxMat::outer(&hc, &hc);
        // entrywise copies, so reassembly is exact
        assert_eq!(full, outer);
    }

    #[test]
    fn mask_block_indices_match_enumeration() {
        // brute-force index check over all block pairs for M=2, N=3
        let h: Vec<Complex64> = (0..6)
            .map(|i| c((i as f64).sin(), (i as f64).cos()))
            .collect();
        let coupling = build_coupling(&h, 2, 3).unwrap();
        for k in 0..3usize {
            let mask = coupling.mask(k);
            for bi in 0..3usize {
                for bj in 0..3usize {
                    for i in 0..2 {
                        for j in 0..2 {
                            let v = mask[(bi * 2 + i, bj * 2 + j)];
                            let expect = if bj == bi + k {
                                h[bi * 2 + i].conj() * h[bj * 2 + j]
                            } else {
                                c(0.0, 0.0)
                            };
                            assert_eq!(v, expect, "k={k} block ({bi},{bj})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mask_zero_is_hermitian_psd() {
        let h: Vec<Complex64> = (0..4).map(|i| c(i as f64 + 0.5, -(i as f64))).collect();
        let coupling = build_coupling(&h, 2, 2).unwrap();
        let m0 = coupling.mask(0);
        assert!(m0.sub(&m0.adjoint()).frobenius_norm() < 1e-15);
        let eig = herm_eig(&HermitianMatrix::from_mat(m0).unwrap()).unwrap();
        assert!(eig.eigenvalues[0] >= -1e-12 * m0.frobenius_norm());
    }

    #[test]
    fn negative_masks_are_adjoints() {
        let h: Vec<Complex64> = (0..6).map(|i| c(1.0 + i as f64, 2.0 - i as f64)).collect();
        let coupling = build_coupling(&h, 2, 3).unwrap();
        for k in 1..3i64 {
            let neg = coupling.mask_signed(-k);
            let adj = coupling.mask(k as usize).adjoint();
            assert_eq!(neg, adj);
        }
    }

    #[test]
    fn rejects_bad_layout() {
        assert!(build_coupling(&[c(1.0, 0.0); 5], 2, 3).is_err());
    }

    #[test]
    fn asymptotic_mask_zero_is_identity() {
        let fc = FreqCouplingMatrices::asymptotic(4);
        assert_eq!(fc.mask(0), &CxMat::identity(4));
        // k-th diagonal is made of ones
        let m2 = fc.mask(2);
        assert_eq!(m2[(0, 2)], c(1.0, 0.0));
        assert_eq!(m2[(1, 3)], c(1.0, 0.0));
        assert_eq!(m2[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn freq_masks_partition_and_scalar_granularity() {
        let h_e = [c(1.0, 2.0), c(-0.5, 0.3), c(0.2, -0.9)];
        let fc = FreqCouplingMatrices::effective(&h_e);
        let outer = CxMat::outer(&h_e, &h_e);
        assert_eq!(fc.reassemble(), outer);
    }
}
