//! Extremal singular values by Lanczos iteration on `MᴴM`.
//!
//! Plain power iteration converges at the rate of the ratio of the two largest
//! singular values squared, which for discretised differential operators is
//! `1 − O(1/n²)`; Lanczos needs roughly the square root of that many steps.

use super::dense::{DenseMatrix, C64, ZERO};
use super::lu::LuFactorization;
use super::operator::{LinearOperator, LinearSolver};
use super::vector::{axpy, dot, norm2, scale};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SIGMA_TOL: f64 = 1e-8;
const START_SEED: u64 = 0x5eed_0001;

/// Settings for [`sigma_max_with`].
#[derive(Clone, Copy, Debug)]
pub struct SigmaOptions {
    /// Relative accuracy of the returned singular value.
    pub tol: f64,
    /// Iteration cap as a multiple of the dimension.
    pub cap_factor: usize,
}

impl Default for SigmaOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SIGMA_TOL,
            cap_factor: 10,
        }
    }
}

/// Fixed start vector: all ones plus a seeded perturbation. The bare ones
/// vector is orthogonal to every antisymmetric eigenvector of a persymmetric
/// matrix, which would hide the top singular value of e.g. a second
/// difference matrix of even order.
fn start_vector(n: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(1.0 + 0.5 * rng.random_range(-1.0..1.0), 0.0))
        .collect();
    let s = 1.0 / norm2(&v);
    scale(C64::new(s, 0.0), &mut v);
    v
}

/// Largest eigenvalue of a Hermitian positive semidefinite map given by
/// `apply`, using Lanczos without reorthogonalization.
fn lanczos_max_eig(n: usize, opts: SigmaOptions, mut apply: impl FnMut(&[C64], &mut [C64])) -> Result<f64> {
    let cap = opts.cap_factor.saturating_mul(n).max(20);
    let mut q = start_vector(n);
    let mut q_prev = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut beta_prev = 0.0;

    for j in 0..cap {
        apply(&q, &mut w);
        let a = dot(&q, &w).re;
        axpy(C64::new(-a, 0.0), &q, &mut w);
        if j > 0 {
            axpy(C64::new(-beta_prev, 0.0), &q_prev, &mut w);
        }
        let b = norm2(&w);
        alpha.push(a);
        let steps = j + 1;
        let invariant = b <= 1e-14 * a.abs().max(beta_prev);
        let check = invariant || steps == n || steps % 5 == 0 || steps < 5;
        if check {
            let (theta, err) = ritz_estimate(&alpha, &beta, b)?;
            if invariant || steps >= n || err <= opts.tol * theta {
                return Ok(theta);
            }
        }
        beta.push(b);
        std::mem::swap(&mut q_prev, &mut q);
        q.copy_from_slice(&w);
        scale(C64::new(1.0 / b, 0.0), &mut q);
        beta_prev = b;
    }
    Err(Error::NoConvergence {
        algorithm: "Lanczos singular value",
        iterations: cap,
    })
}

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`,
/// by the Sturm sequence of the shifted LDLᵀ pivots.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - x - off;
        if q.abs() < tiny {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `j`-th largest eigenvalue (`j = 0` is the largest) by bisection.
fn bisect_eig(d: &[f64], e: &[f64], j: usize) -> f64 {
    let m = d.len();
    let radius = |i: usize| {
        let l = if i > 0 { e[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < m { e[i].abs() } else { 0.0 };
        l + r
    };
    let mut lo = (0..m).map(|i| d[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..m).map(|i| d[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let target = m - j;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // eigenvalue number `target` (1-based, ascending) lies above `mid`
        if sturm_count(d, e, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `|z_m|` for the unit eigenvector `z` of eigenvalue `theta`, by two steps
/// of inverse iteration with the tridiagonal LU.
fn last_component(d: &[f64], e: &[f64], theta: f64) -> f64 {
    let m = d.len();
    if m == 1 {
        return 1.0;
    }
    let scale = d
        .iter()
        .chain(e)
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * scale;
    // LU of T − θI without pivoting; small pivots are nudged, which only
    // perturbs the shift by O(ε‖T‖)
    let mut piv = vec![0.0; m];
    let mut mult = vec![0.0; m];
    piv[0] = d[0] - theta;
    for i in 1..m {
        if piv[i - 1].abs() < floor {
            piv[i - 1] = floor;
        }
        mult[i] = e[i - 1] / piv[i - 1];
        piv[i] = d[i] - theta - mult[i] * e[i - 1];
    }
    if piv[m - 1].abs() < floor {
        piv[m - 1] = floor;
    }
    let mut x = vec![1.0; m];
    for _ in 0..2 {
        for i in 1..m {
            x[i] -= mult[i] * x[i - 1];
        }
        x[m - 1] /= piv[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = (x[i] - e[i] * x[i + 1]) / piv[i];
        }
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nrm.is_finite() && nrm > 0.0) {
            return 1.0;
        }
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    x[m - 1].abs()
}

/// Largest Ritz value of the Lanczos tridiagonal and an error estimate for
/// it. Bisection and inverse iteration keep each call `O(m)`.
fn ritz_estimate(alpha: &[f64], beta: &[f64], b_next: f64) -> Result<(f64, f64)> {
    let m = alpha.len();
    let e = &beta[..m - 1];
    let theta = bisect_eig(alpha, e, 0);
    if !theta.is_finite() {
        return Err(Error::NonFiniteEntry {
            context: "Lanczos tridiagonal",
        });
    }
    let resid = b_next * last_component(alpha, e, theta);
    let gap = if m > 1 {
        theta - bisect_eig(alpha, e, 1)
    } else {
        f64::INFINITY
    };
    // eigenvalue error is quadratic in the residual once the gap is resolved
    let err = if gap.is_finite() && gap > resid {
        resid.min(resid * resid / gap)
    } else {
        resid
    };
    Ok((theta, err))
}

/// Largest singular value of an operator, to relative accuracy `opts.tol`.
pub fn sigma_max_with<A: LinearOperator + ?Sized>(m: &A, opts: SigmaOptions) -> Result<f64> {
    let n = m.dim();
    let mut t = vec![ZERO; n];
    // a relative error tol in σ² is at most tol/2 in σ
    let lambda = lanczos_max_eig(n, opts, |x, y| {
        m.apply(x, &mut t);
        m.apply_adjoint(&t, y);
    })?;
    Ok(lambda.max(0.0).sqrt())
}

/// Largest singular value with default tolerance 1e-8 and cap 10·n.
pub fn sigma_max<A: LinearOperator + ?Sized>(m: &A, tol: f64) -> Result<f64> {
    sigma_max_with(
        m,
        SigmaOptions {
            tol,
            ..SigmaOptions::default()
        },
    )
}

/// Smallest singular value from a factored matrix, as `1/σ_max(M⁻¹)`.
pub fn sigma_min<S: LinearSolver + ?Sized>(solver: &S, tol: f64) -> Result<f64> {
    let n = solver.dim();
    let opts = SigmaOptions {
        tol,
        ..SigmaOptions::default()
    };
    let lambda = lanczos_max_eig(n, opts, |x, y| {
        let t = solver.solve_adjoint(x);
        y.copy_from_slice(&solver.solve(&t));
    })?;
    Ok(1.0 / lambda.sqrt())
}

/// Spectral condition number `σ_max / σ_min` of a dense matrix.
pub fn condition_number_2(m: &DenseMatrix, tol: f64) -> Result<f64> {
    let lu = LuFactorization::new(m)?;
    Ok(sigma_max(m, tol)? / sigma_min(&lu, tol)?)
}
