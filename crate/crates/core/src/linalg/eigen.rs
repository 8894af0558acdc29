use std::cmp::Ordering;

use super::dense::{DenseMatrix, C64};
use super::hessenberg::reduce_in_place;
use super::schur::{hessenberg_eigenvalues_unsorted, real_francis};
use crate::error::{Error, Result};

/// Eigenvalues of a projected Hessenberg matrix, sorted by descending modulus
/// (ties: descending real part, then descending imaginary part).
#[derive(Clone, Debug, PartialEq)]
pub struct RitzSpectrum {
    values: Vec<C64>,
}

impl RitzSpectrum {
    pub fn new(mut values: Vec<C64>) -> Self {
        values.sort_by(descending_modulus);
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.first().map_or(0.0, |z| z.norm())
    }

    /// Whether every value lies in the open right half-plane.
    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|z| z.re > 0.0)
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }
}

fn descending_modulus(a: &C64, b: &C64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| b.re.total_cmp(&a.re))
        .then_with(|| b.im.total_cmp(&a.im))
}

/// All eigenvalues of an upper Hessenberg matrix by shifted QR iteration.
pub fn hessenberg_eigenvalues(h: &DenseMatrix) -> Result<RitzSpectrum> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            got: h.cols(),
        });
    }
    if !h.is_upper_hessenberg() {
        return Err(Error::InvalidInput(
            "matrix has nonzeros below the first subdiagonal".into(),
        ));
    }
    Ok(RitzSpectrum::new(hessenberg_eigenvalues_unsorted(h)?))
}

/// All eigenvalues of a general square matrix (Hessenberg reduction, then QR).
pub fn eigenvalues(a: &DenseMatrix) -> Result<RitzSpectrum> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let n = a.rows();
    if a.is_real() {
        let mut h = a.real_col_major();
        reduce_in_place(&mut h, n, None);
        Ok(RitzSpectrum::new(real_francis(&mut h, n, None, false)?))
    } else {
        let mut h = a.as_slice().to_vec();
        reduce_in_place(&mut h, n, None);
        let h = DenseMatrix::from_col_major(n, n, h)?;
        hessenberg_eigenvalues(&h)
    }
}
