//! Principal matrix square root through the Schur form.

use super::dense::{DenseMatrix, C64, ZERO};
use super::hermitian::min_symmetric_eig;
use super::schur::schur;
use crate::error::{Error, Result};

/// Largest dimension for which the dense reference action is attempted.
pub const DENSE_ORACLE_LIMIT: usize = 5000;

/// Relative tolerance for deciding that an eigenvalue touches the branch cut.
const BRANCH_CUT_TOL: f64 = 1e-12;

/// `A^{1/2} = Z U Zᴴ` where `A = Z T Zᴴ` and `U² = T`.
#[derive(Clone, Debug)]
pub struct SchurSqrt {
    z: DenseMatrix,
    u: DenseMatrix,
    real: bool,
}

impl SchurSqrt {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let s = schur(a)?;
        let eig = s.eigenvalues();
        let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for &e in &eig {
            if e.im.abs() <= BRANCH_CUT_TOL * scale && e.re <= BRANCH_CUT_TOL * scale {
                return Err(Error::SpectrumOnBranchCut { eigenvalue: e });
            }
        }
        let u = sqrt_upper_triangular(&s.t);
        Ok(Self {
            z: s.z,
            u,
            real: a.is_real(),
        })
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    /// `A^{1/2} b`.
    pub fn apply(&self, b: &[C64]) -> Vec<C64> {
        let y = self.z.adjoint().matvec(b);
        let y = self.u.matvec(&y);
        self.finish(self.z.matvec(&y), b)
    }

    /// `A^{-1/2} b`, by a triangular solve with `U`.
    pub fn apply_inverse(&self, b: &[C64]) -> Vec<C64> {
        let mut y = self.z.adjoint().matvec(b);
        upper_triangular_solve(&self.u, &mut y);
        self.finish(self.z.matvec(&y), b)
    }

    /// The square-root matrix itself.
    pub fn matrix(&self) -> DenseMatrix {
        let mut x = self.z.matmul(&self.u).matmul(&self.z.adjoint());
        if self.real {
            for v in x.as_mut_slice() {
                v.im = 0.0;
            }
        }
        x
    }

    fn finish(&self, mut x: Vec<C64>, b: &[C64]) -> Vec<C64> {
        // the principal root of a real matrix is real
        if self.real && b.iter().all(|v| v.im == 0.0) {
            for v in x.iter_mut() {
                v.im = 0.0;
            }
        }
        x
    }
}

/// Principal square root of an upper triangular matrix by the column-oriented
/// recurrence `u_ij = (t_ij − Σ_{i<p<j} u_ip u_pj) / (u_ii + u_jj)`.
pub(crate) fn sqrt_upper_triangular(t: &DenseMatrix) -> DenseMatrix {
    let n = t.rows();
    let mut u = DenseMatrix::zeros(n, n);
    for i in 0..n {
        u[(i, i)] = t[(i, i)].sqrt();
    }
    let mut r = vec![ZERO; n];
    for j in 1..n {
        r[..j].copy_from_slice(&t.col(j)[..j]);
        let ujj = u[(j, j)];
        for i in (0..j).rev() {
            let denom = u[(i, i)] + ujj;
            let uij = if denom == ZERO { ZERO } else { r[i] / denom };
            u[(i, j)] = uij;
            if uij != ZERO {
                let col = &u.col(i)[..i];
                for (rp, &up) in r[..i].iter_mut().zip(col) {
                    *rp -= up * uij;
                }
            }
        }
    }
    u
}

/// Solves `U x = b` in place for upper triangular `U`.
pub(crate) fn upper_triangular_solve(u: &DenseMatrix, x: &mut [C64]) {
    let n = u.rows();
    for j in (0..n).rev() {
        x[j] /= u[(j, j)];
        let xj = x[j];
        if xj == ZERO {
            continue;
        }
        for (xi, &ui) in x[..j].iter_mut().zip(&u.col(j)[..j]) {
            *xi -= ui * xj;
        }
    }
}

/// Principal square root `X` with `X² = A` and spectrum in the open right
/// half-plane.
pub fn dense_sqrt(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(SchurSqrt::new(a)?.matrix())
}

fn oracle_checks(m: &DenseMatrix, b: &[C64]) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    if m.rows() > DENSE_ORACLE_LIMIT {
        return Err(Error::TooLarge {
            n: m.rows(),
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: b.len(),
        });
    }
    let mu = min_symmetric_eig(m)?;
    if mu <= 0.0 {
        return Err(Error::InvalidSpectrum(format!(
            "Hermitian part has eigenvalue {mu:e} <= 0"
        )));
    }
    Ok(())
}

/// Dense reference value of `M^{1/2} b`, used as the error oracle.
pub fn reference_sqrt_action(m: &DenseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    oracle_checks(m, b)?;
    Ok(SchurSqrt::new(m)?.apply(b))
}

/// Dense reference value of `M^{-1/2} b`.
pub fn reference_invsqrt_action(m: &DenseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    oracle_checks(m, b)?;
    Ok(SchurSqrt::new(m)?.apply_inverse(b))
}
