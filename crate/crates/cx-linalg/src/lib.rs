//! Dense complex Hermitian linear algebra kernel.
//!
//! Everything here is a pure function on immutable inputs and safe to
//! call concurrently. Matrices are small (tens of rows); the focus is
//! deterministic, reproducible output: fixed pivoting, fixed tie-breaks
//! and eigenvector phase canonicalization, so byte-identical inputs give
//! byte-identical results.

mod error;
mod hermitian;
mod mat;

pub use error::CxLinalgError;
pub use hermitian::{
    canonicalize_phase, dominant_eigvec, herm_eig, min_eigvec, psd_sqrt, EigenDecomposition,
    ExtremeEigvec, HermitianMatrix,
};
pub use mat::{cdot, vnorm, vnorm_sq, CxMat};

pub use num_complex::Complex64;
