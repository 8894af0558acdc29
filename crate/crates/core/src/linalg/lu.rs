//! LU factorization with partial pivoting, plus O(k²) variants specialised to
//! upper Hessenberg matrices.

use super::dense::{DenseMatrix, C64, ONE, ZERO};
use super::hessenberg::Scalar;
use super::operator::LinearSolver;
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot below `PIVOT_TOL · max row norm` is singular.
pub const PIVOT_TOL: f64 = 1e-14;

/// Determinant in polar form, `det = phase · exp(log_abs)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub phase: C64,
}

impl LogDet {
    pub fn value(&self) -> C64 {
        self.phase * self.log_abs.exp()
    }

    /// `self / other` as a complex number.
    pub fn ratio(&self, other: &LogDet) -> C64 {
        (self.phase / other.phase) * (self.log_abs - other.log_abs).exp()
    }

    fn accumulate(&mut self, pivot: C64) {
        let r = pivot.norm();
        self.log_abs += r.ln();
        self.phase *= pivot / r;
    }
}

impl Default for LogDet {
    fn default() -> Self {
        Self {
            log_abs: 0.0,
            phase: ONE,
        }
    }
}

/// `P A = L U` with unit lower `L`, stored compactly.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    lu: DenseMatrix,
    perm: Vec<usize>,
    log_det: LogDet,
}

impl LuFactorization {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                got: a.cols(),
            });
        }
        let n = a.rows();
        let threshold = PIVOT_TOL * a.max_row_norm();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut log_det = LogDet::default();

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= threshold || pmax == 0.0 {
                return Err(Error::SingularMatrix { pivot: pmax, threshold });
            }
            if p != k {
                perm.swap(k, p);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                log_det.phase = -log_det.phase;
            }
            let pivot = lu[(k, k)];
            log_det.accumulate(pivot);
            let inv = ONE / pivot;
            for i in (k + 1)..n {
                lu[(i, k)] *= inv;
            }
            for j in (k + 1)..n {
                let ukj = lu[(k, j)];
                if ukj == ZERO {
                    continue;
                }
                let col = lu.as_mut_slice();
                let (left, right) = col.split_at_mut(j * n);
                let lk = &left[k * n..(k + 1) * n];
                let cj = &mut right[..n];
                for i in (k + 1)..n {
                    cj[i] -= lk[i] * ukj;
                }
            }
        }
        Ok(Self { lu, perm, log_det })
    }

    pub fn log_det(&self) -> LogDet {
        self.log_det
    }

    pub fn det(&self) -> C64 {
        self.log_det.value()
    }
}

impl LinearSolver for LuFactorization {
    fn dim(&self) -> usize {
        self.lu.rows()
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        // forward, unit lower
        for k in 0..n {
            let xk = x[k];
            if xk == ZERO {
                continue;
            }
            let col = self.lu.col(k);
            for i in (k + 1)..n {
                x[i] -= col[i] * xk;
            }
        }
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            x[k] /= col[k];
            let xk = x[k];
            for i in 0..k {
                x[i] -= col[i] * xk;
            }
        }
        x
    }

    fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        // A^H = U^H L^H P
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for k in 0..n {
            let col = self.lu.col(k);
            let s: C64 = (0..k).map(|i| col[i].conj() * y[i]).sum();
            y[k] = (y[k] - s) / col[k].conj();
        }
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            let s: C64 = ((k + 1)..n).map(|i| col[i].conj() * y[i]).sum();
            y[k] -= s;
        }
        let mut x = vec![ZERO; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: b.len(),
        });
    }
    Ok(LuFactorization::new(a)?.solve(b))
}

/// Row-major copy of an upper Hessenberg matrix, prepared for repeated
/// shifted determinant evaluations in O(k²) each. Real matrices are kept in
/// real arithmetic for real shifts.
#[derive(Clone, Debug)]
pub struct HessenbergRows {
    rows: RowStorage,
    scale: f64,
}

#[derive(Clone, Debug)]
enum RowStorage {
    // row i holds columns max(i,1)-1 .. k
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<C64>>),
}

fn packed_rows<T>(h: &DenseMatrix, f: impl Fn(C64) -> T) -> Vec<Vec<T>> {
    let k = h.rows();
    (0..k)
        .map(|i| (i.saturating_sub(1)..k).map(|j| f(h[(i, j)])).collect())
        .collect()
}

/// Gaussian elimination with adjacent-row pivoting on packed Hessenberg rows.
/// Returns `(log|det|, phase)` of `H − zI`.
fn packed_log_det<T: Scalar>(rows: &[Vec<T>], z: T, threshold: f64) -> Option<(f64, T)> {
    let k = rows.len();
    let mut cur: Vec<T> = rows[0].clone();
    cur[0] -= z;
    let mut log_abs = 0.0;
    let mut phase = T::from_f64(1.0);
    for j in 0..k {
        let a = cur[j];
        if j + 1 == k {
            if a.abs() <= threshold {
                return None;
            }
            log_abs += a.abs().ln();
            phase = phase * a.phase();
            break;
        }
        let next = &rows[j + 1];
        let at = |c: usize| {
            let v = next[c - j];
            if c == j + 1 {
                v - z
            } else {
                v
            }
        };
        let b = next[0];
        if a.abs() >= b.abs() {
            if a.abs() <= threshold {
                return None;
            }
            let m = b / a;
            for c in (j + 1)..k {
                cur[c] = at(c) - m * cur[c];
            }
            log_abs += a.abs().ln();
            phase = phase * a.phase();
        } else {
            if b.abs() <= threshold {
                return None;
            }
            let m = a / b;
            for c in (j + 1)..k {
                cur[c] -= m * at(c);
            }
            log_abs += b.abs().ln();
            phase = -(phase * b.phase());
        }
    }
    Some((log_abs, phase))
}

impl HessenbergRows {
    pub fn new(h: &DenseMatrix) -> Self {
        assert!(h.is_square());
        let rows = if h.is_real() {
            RowStorage::Real(packed_rows(h, |v| v.re))
        } else {
            RowStorage::Complex(packed_rows(h, |v| v))
        };
        Self {
            rows,
            scale: h.max_row_norm(),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.rows {
            RowStorage::Real(r) => r.len(),
            RowStorage::Complex(r) => r.len(),
        }
    }

    /// `log det(H − z I)`, or `None` if a pivot falls below the singularity
    /// threshold.
    pub fn log_det_shifted(&self, z: C64) -> Option<LogDet> {
        if self.dim() == 0 {
            return Some(LogDet::default());
        }
        let threshold = PIVOT_TOL * (self.scale + z.norm());
        match &self.rows {
            RowStorage::Real(r) if z.im == 0.0 => packed_log_det(r, z.re, threshold).map(|(log_abs, p)| LogDet {
                log_abs,
                phase: C64::new(p, 0.0),
            }),
            RowStorage::Real(r) => {
                let c: Vec<Vec<C64>> = r
                    .iter()
                    .map(|row| row.iter().map(|&v| C64::new(v, 0.0)).collect())
                    .collect();
                packed_log_det(&c, z, threshold).map(|(log_abs, phase)| LogDet { log_abs, phase })
            }
            RowStorage::Complex(c) => packed_log_det(c, z, threshold).map(|(log_abs, phase)| LogDet { log_abs, phase }),
        }
    }
}

/// Solves `(H − z I) x = b` for upper Hessenberg `H` in O(k²) using adjacent-row
/// pivoting.
pub fn hessenberg_solve(h: &DenseMatrix, z: C64, b: &[C64]) -> Result<Vec<C64>> {
    let k = h.rows();
    if b.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: b.len(),
        });
    }
    let threshold = PIVOT_TOL * (h.max_row_norm() + z.norm());
    let mut a = h.shifted(-z);
    let mut x = b.to_vec();
    for j in 0..k {
        if j + 1 < k && a[(j + 1, j)].norm() > a[(j, j)].norm() {
            for c in j..k {
                let t = a[(j, c)];
                a[(j, c)] = a[(j + 1, c)];
                a[(j + 1, c)] = t;
            }
            x.swap(j, j + 1);
        }
        let piv = a[(j, j)];
        if piv.norm() <= threshold || piv == ZERO {
            return Err(Error::SingularMatrix {
                pivot: piv.norm(),
                threshold,
            });
        }
        if j + 1 < k {
            let m = a[(j + 1, j)] / piv;
            if m != ZERO {
                for c in (j + 1)..k {
                    let u = a[(j, c)];
                    a[(j + 1, c)] -= m * u;
                }
                let xj = x[j];
                x[j + 1] -= m * xj;
            }
        }
    }
    for j in (0..k).rev() {
        x[j] /= a[(j, j)];
        let xj = x[j];
        let col = a.col(j);
        for i in 0..j {
            x[i] -= col[i] * xj;
        }
    }
    Ok(x)
}
