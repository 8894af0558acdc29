//! Householder QR with a normalised (real, nonnegative) diagonal of `R`.

use super::dense::{DenseMatrix, C64, ZERO};
use super::vector::{dot, norm2};
use crate::error::{Error, Result};

/// Thin QR factorization `A = Q R` of a tall matrix.
///
/// `Q` is `rows × cols` with orthonormal columns and `R` is `cols × cols` upper
/// triangular with real nonnegative diagonal, which makes the factorization
/// unique for full-rank `A`.
pub fn qr_householder(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::InvalidInput(format!(
            "qr_householder needs rows >= cols, got {m}x{n}"
        )));
    }
    let mut work = a.clone();
    let mut reflectors: Vec<Option<Vec<C64>>> = Vec::with_capacity(n);

    for j in 0..n {
        let x = &work.col(j)[j..];
        let xnorm = norm2(x);
        if xnorm == 0.0 {
            reflectors.push(None);
            continue;
        }
        let phase = if x[0] == ZERO {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm = norm2(&v);
        if vnorm == 0.0 {
            reflectors.push(None);
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        for c in j..n {
            let col = &mut work.col_mut(c)[j..];
            let s = dot(&v, col) * 2.0;
            for (ci, vi) in col.iter_mut().zip(&v) {
                *ci -= s * vi;
            }
        }
        reflectors.push(Some(v));
    }

    let mut r = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            r[(i, j)] = work[(i, j)];
        }
    }

    let mut q = DenseMatrix::zeros(m, n);
    for j in 0..n {
        q[(j, j)] = C64::new(1.0, 0.0);
    }
    for (j, refl) in reflectors.iter().enumerate().rev() {
        let Some(v) = refl else { continue };
        for c in 0..n {
            let col = &mut q.col_mut(c)[j..];
            let s = dot(v, col) * 2.0;
            for (ci, vi) in col.iter_mut().zip(v) {
                *ci -= s * vi;
            }
        }
    }

    for j in 0..n {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag == 0.0 {
            continue;
        }
        let p = d / mag;
        for c in j..n {
            r[(j, c)] *= p.conj();
        }
        r[(j, j)] = C64::new(mag, 0.0);
        for ci in q.col_mut(j) {
            *ci *= p;
        }
    }
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn orthogonality_defect(q: &DenseMatrix) -> f64 {
        q.adjoint()
            .matmul(q)
            .sub(&DenseMatrix::identity(q.cols()))
            .frobenius_norm()
    }

    #[test]
    fn identity_is_fixed() {
        let (q, r) = qr_householder(&DenseMatrix::identity(4)).unwrap();
        assert!(q.sub(&DenseMatrix::identity(4)).frobenius_norm() < 1e-15);
        assert!(r.sub(&DenseMatrix::identity(4)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn permutation_reconstructs() {
        let a = DenseMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (q, r) = qr_householder(&a).unwrap();
        assert!(orthogonality_defect(&q) < 1e-14);
        assert!(q.matmul(&r).sub(&a).frobenius_norm() < 1e-14);
    }

    #[test]
    fn gaussian_reconstruction_and_diagonal_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DenseMatrix::from_fn(8, 8, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let (q, r) = qr_householder(&a).unwrap();
        assert!(r.is_upper_triangular());
        assert!(orthogonality_defect(&q) <= 1e-12 * 8.0);
        assert!(q.matmul(&r).sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
        for j in 0..8 {
            assert!(r[(j, j)].im == 0.0 && r[(j, j)].re > 0.0);
        }
    }

    #[test]
    fn tall_matrix_gives_thin_factors() {
        let a = DenseMatrix::from_fn(6, 3, |i, j| C64::new((i * 3 + j) as f64, (i as f64) - 1.0));
        let (q, r) = qr_householder(&a).unwrap();
        assert_eq!((q.rows(), q.cols(), r.rows()), (6, 3, 3));
        assert!(q.matmul(&r).sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
        assert!(qr_householder(&a.transpose()).is_err());
    }
}
