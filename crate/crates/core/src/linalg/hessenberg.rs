//! Householder reduction to upper Hessenberg form, `A = Q H Qᴴ`.

use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use super::dense::{DenseMatrix, C64};

/// The scalar operations the reduction needs, implemented for `f64` and `C64`
/// so real inputs stay in real arithmetic.
pub(crate) trait Scalar:
    Copy
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Sum
{
    const ZERO: Self;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn from_f64(x: f64) -> Self;
    /// `x / |x|`, or one when `x` vanishes.
    fn phase(self) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    fn conj(self) -> Self {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for C64 {
    const ZERO: Self = C64::new(0.0, 0.0);
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    fn phase(self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            self / r
        }
    }
}

/// In-place reduction of the column-major `n × n` array `a`. When `q` is given
/// it must hold the identity on entry and receives the accumulated unitary.
pub(crate) fn reduce_in_place<T: Scalar>(a: &mut [T], n: usize, mut q: Option<&mut [T]>) {
    let mut v: Vec<T> = Vec::with_capacity(n);
    let mut w: Vec<T> = vec![T::ZERO; n];
    for j in 0..n.saturating_sub(2) {
        let x = &a[j * n + j + 1..(j + 1) * n];
        if x[1..].iter().all(|&e| e == T::ZERO) {
            continue;
        }
        let xnorm = x.iter().map(|e| e.abs().powi(2)).sum::<f64>().sqrt();
        let alpha = -(x[0].phase() * T::from_f64(xnorm));
        v.clear();
        v.extend_from_slice(x);
        v[0] -= alpha;
        let vnorm = v.iter().map(|e| e.abs().powi(2)).sum::<f64>().sqrt();
        let inv = T::from_f64(1.0 / vnorm);
        for e in v.iter_mut() {
            *e = *e * inv;
        }
        let two = T::from_f64(2.0);
        let off = j + 1;

        // left: rows off..n of columns j..n
        a[j * n + off] = alpha;
        for e in &mut a[j * n + off + 1..(j + 1) * n] {
            *e = T::ZERO;
        }
        for c in (j + 1)..n {
            let col = &mut a[c * n + off..(c + 1) * n];
            let s: T = v.iter().zip(col.iter()).map(|(&vi, &ci)| vi.conj() * ci).sum();
            let s = s * two;
            for (ci, &vi) in col.iter_mut().zip(&v) {
                *ci -= s * vi;
            }
        }

        // right: columns off..n of all rows
        w.iter_mut().for_each(|e| *e = T::ZERO);
        for (t, &vc) in v.iter().enumerate() {
            let col = &a[(off + t) * n..(off + t + 1) * n];
            for (wi, &ci) in w.iter_mut().zip(col) {
                *wi += ci * vc;
            }
        }
        for (t, &vc) in v.iter().enumerate() {
            let f = two * vc.conj();
            let col = &mut a[(off + t) * n..(off + t + 1) * n];
            for (ci, &wi) in col.iter_mut().zip(&w) {
                *ci -= wi * f;
            }
        }

        if let Some(q) = q.as_deref_mut() {
            w.iter_mut().for_each(|e| *e = T::ZERO);
            for (t, &vc) in v.iter().enumerate() {
                let col = &q[(off + t) * n..(off + t + 1) * n];
                for (wi, &ci) in w.iter_mut().zip(col) {
                    *wi += ci * vc;
                }
            }
            for (t, &vc) in v.iter().enumerate() {
                let f = two * vc.conj();
                let col = &mut q[(off + t) * n..(off + t + 1) * n];
                for (ci, &wi) in col.iter_mut().zip(&w) {
                    *ci -= wi * f;
                }
            }
        }
    }
}

/// Reduces a square matrix to upper Hessenberg form, returning `(H, Q)` with
/// `A = Q H Qᴴ`.
pub fn hessenberg_reduce(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    assert!(a.is_square(), "hessenberg_reduce needs a square matrix");
    let n = a.rows();
    if a.is_real() {
        let mut h = a.real_col_major();
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        reduce_in_place(&mut h, n, Some(&mut q));
        (
            DenseMatrix::from_real_col_major(n, n, &h),
            DenseMatrix::from_real_col_major(n, n, &q),
        )
    } else {
        let mut h = a.as_slice().to_vec();
        let mut q = DenseMatrix::identity(n).into_col_major();
        reduce_in_place(&mut h, n, Some(&mut q));
        let h = DenseMatrix::from_col_major(n, n, h).expect("finite by construction");
        let q = DenseMatrix::from_col_major(n, n, q).expect("finite by construction");
        (h, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &DenseMatrix) {
        let (h, q) = hessenberg_reduce(a);
        assert!(h.is_upper_hessenberg());
        let n = a.rows() as f64;
        let defect = q.adjoint().matmul(&q).sub(&DenseMatrix::identity(a.rows()));
        assert!(defect.frobenius_norm() <= 1e-13 * n);
        let back = q.matmul(&h).matmul(&q.adjoint());
        assert!(back.sub(a).frobenius_norm() <= 1e-13 * a.frobenius_norm());
    }

    #[test]
    fn real_and_complex_reductions_reconstruct() {
        let real = DenseMatrix::from_fn(7, 7, |i, j| C64::new(((i * 7 + j * 3) % 11) as f64 - 5.0, 0.0));
        check(&real);
        let (h, _) = hessenberg_reduce(&real);
        assert!(h.is_real());
        let cplx = DenseMatrix::from_fn(6, 6, |i, j| {
            C64::new((i + 2 * j) as f64 % 5.0, (i as f64 - j as f64) / 3.0)
        });
        check(&cplx);
    }

    #[test]
    fn tridiagonal_input_is_untouched() {
        let t = DenseMatrix::from_fn(5, 5, |i, j| {
            let d = i as isize - j as isize;
            C64::new(
                if d == 0 {
                    2.0
                } else if d.abs() == 1 {
                    -1.0
                } else {
                    0.0
                },
                0.0,
            )
        });
        let (h, q) = hessenberg_reduce(&t);
        assert_eq!(h, t);
        assert_eq!(q, DenseMatrix::identity(5));
    }
}
