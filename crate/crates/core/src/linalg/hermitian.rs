//! Eigenvalues of Hermitian matrices and of the Hermitian part of a general
//! matrix, via tridiagonalization and implicit QL.

use super::dense::{DenseMatrix, C64};
use super::hessenberg::reduce_in_place;
use crate::error::{Error, Result};

/// Implicit QL iteration on a symmetric tridiagonal matrix with diagonal `d`
/// and subdiagonal `e` (`e[i]` couples `i` and `i+1`; `e.len() == d.len()`,
/// last entry ignored). On return `d` holds the eigenvalues, unsorted.
///
/// If `z` is given it holds `r` rows of the eigenvector accumulator in
/// column-major order (`z.len() == r·n`), typically rows of the identity on
/// entry; on return they are the same rows of the eigenvector matrix. One row
/// is enough when only the last components of the eigenvectors are needed.
pub(crate) fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let max_iter = 30 * n.max(10);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence {
                    algorithm: "tridiagonal QL",
                    iterations: max_iter,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let rows = z.len() / n;
                    let (left, right) = z.split_at_mut((i + 1) * rows);
                    for (a, b) in left[i * rows..].iter_mut().zip(&mut right[..rows]) {
                        let zf = *b;
                        *b = s * *a + c * zf;
                        *a = c * *a - s * zf;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Householder tridiagonalization of a real symmetric matrix (lower triangle
/// used). Returns `(diagonal, subdiagonal)`.
fn symmetric_tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut p = vec![0.0; n];
    for j in 0..n.saturating_sub(2) {
        let off = j + 1;
        let x = &a[j * n + off..(j + 1) * n];
        let tail = x[1..].iter().map(|v| v * v).sum::<f64>();
        if tail == 0.0 {
            e[j] = x[0];
            continue;
        }
        let xnorm = (x[0] * x[0] + tail).sqrt();
        let alpha = if x[0] < 0.0 { xnorm } else { -xnorm };
        let mut v: Vec<f64> = x.to_vec();
        v[0] -= alpha;
        let vn2: f64 = v.iter().map(|t| t * t).sum();
        let tau = 2.0 / vn2;
        e[j] = alpha;
        let m = n - off;
        // p = tau * A22 v (A22 symmetric; use full columns of the trailing block)
        for t in p[..m].iter_mut() {
            *t = 0.0;
        }
        for (c, &vc) in v.iter().enumerate() {
            let col = &a[(off + c) * n + off..(off + c + 1) * n];
            for (pi, &ai) in p[..m].iter_mut().zip(col) {
                *pi += ai * vc;
            }
        }
        let mut kappa = 0.0;
        for (pi, &vi) in p[..m].iter_mut().zip(&v) {
            *pi *= tau;
            kappa += *pi * vi;
        }
        let kappa = 0.5 * tau * kappa;
        for (pi, &vi) in p[..m].iter_mut().zip(&v) {
            *pi -= kappa * vi;
        }
        // A22 -= v wᵀ + w vᵀ
        for c in 0..m {
            let (vc, wc) = (v[c], p[c]);
            let col = &mut a[(off + c) * n + off..(off + c + 1) * n];
            for ((ai, &vi), &wi) in col.iter_mut().zip(&v).zip(&p[..m]) {
                *ai -= vi * wc + wi * vc;
            }
        }
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[i * n + i];
    }
    if n >= 2 {
        e[n - 2] = a[(n - 2) * n + n - 1];
    }
    (d, e)
}

/// All eigenvalues of a Hermitian matrix in ascending order. Only the Hermitian
/// part `(A + Aᴴ)/2` of the input is used.
pub fn hermitian_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let n = a.rows();
    let herm = a.hermitian_part();
    let (mut d, mut e) = if herm.is_real() {
        let mut w = herm.real_col_major();
        symmetric_tridiagonalize(&mut w, n)
    } else {
        let mut w: Vec<C64> = herm.into_col_major();
        reduce_in_place(&mut w, n, None);
        let d = (0..n).map(|i| w[i * n + i].re).collect();
        // a diagonal unitary similarity makes the off-diagonal real and nonnegative
        let e = (0..n)
            .map(|i| if i + 1 < n { w[i * n + i + 1].norm() } else { 0.0 })
            .collect();
        (d, e)
    };
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Smallest eigenvalue of the Hermitian part `(M + Mᴴ)/2`. A positive value
/// certifies `Re(xᴴ M x) > 0` for all nonzero `x`.
pub fn min_symmetric_eig(m: &DenseMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Smallest eigenvalue of a real symmetric tridiagonal matrix.
pub fn tridiagonal_min_eig(diag: &[f64], off: &[f64]) -> Result<f64> {
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.resize(d.len(), 0.0);
    tridiagonal_ql(&mut d, &mut e, None)?;
    Ok(d.into_iter().fold(f64::INFINITY, f64::min))
}

/// Eigenvalues and orthonormal eigenvectors (columns of an `n × n`
/// column-major array) of a real symmetric tridiagonal matrix. Eigenvalues
/// come back ascending with the eigenvectors in matching order.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if off.len() + 1 != n.max(1) {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            got: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.resize(n, 0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tridiagonal_ql(&mut d, &mut e, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = order.iter().map(|&j| d[j]).collect();
    let mut vecs = Vec::with_capacity(n * n);
    for &j in &order {
        vecs.extend_from_slice(&z[j * n..(j + 1) * n]);
    }
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_rank_one_hermitian_part() {
        assert!((min_symmetric_eig(&DenseMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-15);
        let a = DenseMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(min_symmetric_eig(&a).unwrap().abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_sum_to_trace_and_match_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 30;
        let a = DenseMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
        let s = a.adjoint().matmul(&a);
        let eig = hermitian_eigenvalues(&s).unwrap();
        let tr: f64 = eig.iter().sum();
        assert!((tr - s.trace().re).abs() <= 1e-11 * tr.abs());
        let sq: f64 = eig.iter().map(|x| x * x).sum();
        let fro2 = s.frobenius_norm().powi(2);
        assert!((sq - fro2).abs() <= 1e-11 * fro2);
        assert!(eig[0] > -1e-12);
    }

    #[test]
    fn complex_hermitian_matches_real_embedding() {
        // eigenvalues of A + iB (Hermitian) appear twice in [[A, -B], [B, A]]
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 6;
        let g = DenseMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = g.hermitian_part();
        let big = DenseMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let z = h[(i % n, j % n)];
            let v = match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            };
            C64::new(v, 0.0)
        });
        let small = hermitian_eigenvalues(&h).unwrap();
        let doubled = hermitian_eigenvalues(&big).unwrap();
        for (i, v) in small.iter().enumerate() {
            assert!((v - doubled[2 * i]).abs() < 1e-12);
            assert!((v - doubled[2 * i + 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_laplacian_minimum() {
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((tridiagonal_min_eig(&d, &e).unwrap() - exact).abs() < 1e-13);
    }
}
