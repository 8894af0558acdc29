//! Schur decomposition `A = Z T Zᴴ` with `T` complex upper triangular.
//!
//! Real inputs go through the Francis double-shift QR iteration in real
//! arithmetic; the resulting quasi-triangular form is then triangularised by
//! one unitary rotation per 2×2 block. Complex inputs use a single-shift QR
//! iteration with Givens rotations.

use super::dense::{DenseMatrix, C64, ZERO};
use super::hessenberg::reduce_in_place;
use crate::error::{Error, Result};

const EXCEPTIONAL_PERIOD: usize = 10;

#[derive(Clone, Debug)]
pub struct SchurDecomposition {
    /// Unitary Schur vectors.
    pub z: DenseMatrix,
    /// Upper triangular Schur form; eigenvalues on the diagonal.
    pub t: DenseMatrix,
}

impl SchurDecomposition {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diagonal()
    }
}

/// Complex Schur decomposition of a square matrix.
pub fn schur(a: &DenseMatrix) -> Result<SchurDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let n = a.rows();
    if a.is_real() {
        let mut h = a.real_col_major();
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        reduce_in_place(&mut h, n, Some(&mut z));
        real_francis(&mut h, n, Some(&mut z), true)?;
        let mut t = DenseMatrix::from_real_col_major(n, n, &h);
        let mut zc = DenseMatrix::from_real_col_major(n, n, &z);
        triangularize_blocks(&mut t, &mut zc);
        Ok(SchurDecomposition { z: zc, t })
    } else {
        let mut h = a.clone();
        let mut z = DenseMatrix::identity(n);
        reduce_in_place(h.as_mut_slice(), n, Some(z.as_mut_slice()));
        complex_qr(&mut h, Some(&mut z), true)?;
        Ok(SchurDecomposition { z, t: h })
    }
}

/// Eigenvalues of an upper Hessenberg matrix, unsorted, without forming Schur
/// vectors.
pub(crate) fn hessenberg_eigenvalues_unsorted(h: &DenseMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    if h.is_real() {
        let mut a = h.real_col_major();
        real_francis(&mut a, n, None, false)
    } else {
        let mut a = h.clone();
        complex_qr(&mut a, None, false)?;
        Ok(a.diagonal())
    }
}

fn iteration_budget(n: usize) -> usize {
    30 * n.max(10)
}

/// Eigenvalues of `[[a, b], [c, d]]`, the first being the one closer to `d`.
fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let (l1, l2) = (half_tr + root, half_tr - root);
    if (l1 - d).norm() <= (l2 - d).norm() {
        (l1, l2)
    } else {
        (l2, l1)
    }
}

/// Francis double-shift QR on a real upper Hessenberg array (column-major).
///
/// With `want_t` the full quasi-triangular form is produced in `h`; otherwise
/// only the active window is updated. Returns the eigenvalues in diagonal
/// order.
pub(crate) fn real_francis(h: &mut [f64], n: usize, mut z: Option<&mut [f64]>, want_t: bool) -> Result<Vec<C64>> {
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    if n == 0 {
        return Ok(Vec::new());
    }
    macro_rules! at {
        ($i:expr, $j:expr) => {
            h[($i) + ($j) * n]
        };
    }
    for j in 0..n.saturating_sub(3) {
        at!(j + 2, j) = 0.0;
        at!(j + 3, j) = 0.0;
    }
    if n >= 3 {
        at!(n - 1, n - 3) = 0.0;
    }

    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let itmax = iteration_budget(n);
    let mut kdefl = 0usize;
    let mut i = n as isize - 1;

    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut converged = false;
        for _its in 0..=itmax {
            // search for a negligible subdiagonal entry
            let mut k = iu;
            while k > l {
                let hk = at!(k, k - 1).abs();
                if hk <= smlnum {
                    break;
                }
                let mut tst = at!(k - 1, k - 1).abs() + at!(k, k).abs();
                if tst == 0.0 {
                    if k >= 2 {
                        tst += at!(k - 1, k - 2).abs();
                    }
                    if k + 1 < n {
                        tst += at!(k + 1, k).abs();
                    }
                }
                if hk <= ulp * tst {
                    let ab = hk.max(at!(k - 1, k).abs());
                    let ba = hk.min(at!(k - 1, k).abs());
                    let aa = at!(k, k).abs().max((at!(k - 1, k - 1) - at!(k, k)).abs());
                    let bb = at!(k, k).abs().min((at!(k - 1, k - 1) - at!(k, k)).abs());
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                at!(l, l - 1) = 0.0;
            }
            if l + 1 >= iu {
                converged = true;
                break;
            }
            kdefl += 1;
            let (i1, i2) = if want_t { (0, n - 1) } else { (l, iu) };

            let (h11, h12, h21, h22);
            if kdefl.is_multiple_of(2 * EXCEPTIONAL_PERIOD) {
                let s = at!(iu, iu - 1).abs() + at!(iu - 1, iu - 2).abs();
                h11 = 0.75 * s + at!(iu, iu);
                h12 = -0.4375 * s;
                h21 = s;
                h22 = h11;
            } else if kdefl.is_multiple_of(EXCEPTIONAL_PERIOD) {
                let s = at!(l + 1, l).abs() + at!(l + 2, l + 1).abs();
                h11 = 0.75 * s + at!(l, l);
                h12 = -0.4375 * s;
                h21 = s;
                h22 = h11;
            } else {
                h11 = at!(iu - 1, iu - 1);
                h21 = at!(iu, iu - 1);
                h12 = at!(iu - 1, iu);
                h22 = at!(iu, iu);
            }
            let s = h11.abs() + h12.abs() + h21.abs() + h22.abs();
            let (rt1r, rt1i, rt2r, rt2i);
            if s == 0.0 {
                rt1r = 0.0;
                rt1i = 0.0;
                rt2r = 0.0;
                rt2i = 0.0;
            } else {
                let (h11, h12, h21, h22) = (h11 / s, h12 / s, h21 / s, h22 / s);
                let tr = (h11 + h22) / 2.0;
                let det = (h11 - tr) * (h22 - tr) - h12 * h21;
                let rtdisc = det.abs().sqrt();
                if det >= 0.0 {
                    rt1r = tr * s;
                    rt2r = rt1r;
                    rt1i = rtdisc * s;
                    rt2i = -rt1i;
                } else {
                    let a = tr + rtdisc;
                    let b = tr - rtdisc;
                    let r = if (a - h22).abs() <= (b - h22).abs() {
                        a * s
                    } else {
                        b * s
                    };
                    rt1r = r;
                    rt2r = r;
                    rt1i = 0.0;
                    rt2i = 0.0;
                }
            }

            // look for two consecutive small subdiagonals
            let mut v = [0.0f64; 3];
            let mut m = iu - 2;
            loop {
                let h21s = at!(m + 1, m);
                let s = (at!(m, m) - rt2r).abs() + rt2i.abs() + h21s.abs();
                let h21s = h21s / s;
                v[0] = h21s * at!(m, m + 1) + (at!(m, m) - rt1r) * ((at!(m, m) - rt2r) / s) - rt1i * (rt2i / s);
                v[1] = h21s * (at!(m, m) + at!(m + 1, m + 1) - rt1r - rt2r);
                v[2] = h21s * at!(m + 2, m + 1);
                let s = v[0].abs() + v[1].abs() + v[2].abs();
                v[0] /= s;
                v[1] /= s;
                v[2] /= s;
                if m == l {
                    break;
                }
                let h00 = at!(m, m - 1).abs() * (v[1].abs() + v[2].abs());
                let h01 = v[0].abs() * (at!(m - 1, m - 1).abs() + at!(m, m).abs() + at!(m + 1, m + 1).abs());
                if h00 <= ulp * h01 {
                    break;
                }
                m -= 1;
            }

            // double-shift bulge chase
            for k in m..iu {
                let nr = 3.min(iu - k + 1);
                if k > m {
                    for t in 0..nr {
                        v[t] = at!(k + t, k - 1);
                    }
                }
                let t1 = householder3(&mut v[..nr]);
                if k > m {
                    at!(k, k - 1) = v[0];
                    at!(k + 1, k - 1) = 0.0;
                    if k + 2 <= iu {
                        at!(k + 2, k - 1) = 0.0;
                    }
                } else if m > l {
                    at!(k, k - 1) *= 1.0 - t1;
                }
                let v2 = v[1];
                let t2 = t1 * v2;
                if nr == 3 {
                    let v3 = v[2];
                    let t3 = t1 * v3;
                    for j in k..=i2 {
                        let base = j * n + k;
                        let sum = h[base] + v2 * h[base + 1] + v3 * h[base + 2];
                        h[base] -= sum * t1;
                        h[base + 1] -= sum * t2;
                        h[base + 2] -= sum * t3;
                    }
                    let top = (k + 3).min(iu);
                    let (c0, rest) = h[k * n..].split_at_mut(n);
                    let (c1, c2) = rest.split_at_mut(n);
                    for j in i1..=top {
                        let sum = c0[j] + v2 * c1[j] + v3 * c2[j];
                        c0[j] -= sum * t1;
                        c1[j] -= sum * t2;
                        c2[j] -= sum * t3;
                    }
                    if let Some(z) = z.as_deref_mut() {
                        let (c0, rest) = z[k * n..].split_at_mut(n);
                        let (c1, c2) = rest.split_at_mut(n);
                        for j in 0..n {
                            let sum = c0[j] + v2 * c1[j] + v3 * c2[j];
                            c0[j] -= sum * t1;
                            c1[j] -= sum * t2;
                            c2[j] -= sum * t3;
                        }
                    }
                } else if nr == 2 {
                    for j in k..=i2 {
                        let base = j * n + k;
                        let sum = h[base] + v2 * h[base + 1];
                        h[base] -= sum * t1;
                        h[base + 1] -= sum * t2;
                    }
                    let (c0, c1) = h[k * n..].split_at_mut(n);
                    for j in i1..=iu {
                        let sum = c0[j] + v2 * c1[j];
                        c0[j] -= sum * t1;
                        c1[j] -= sum * t2;
                    }
                    if let Some(z) = z.as_deref_mut() {
                        let (c0, c1) = z[k * n..].split_at_mut(n);
                        for j in 0..n {
                            let sum = c0[j] + v2 * c1[j];
                            c0[j] -= sum * t1;
                            c1[j] -= sum * t2;
                        }
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                algorithm: "real Francis QR",
                iterations: itmax,
            });
        }
        if l == iu {
            wr[iu] = at!(iu, iu);
            wi[iu] = 0.0;
        } else {
            let (e1, e2) = eig2(
                C64::new(at!(l, l), 0.0),
                C64::new(at!(l, iu), 0.0),
                C64::new(at!(iu, l), 0.0),
                C64::new(at!(iu, iu), 0.0),
            );
            // keep conjugate pairs exact
            let (e1, e2) = if e1.im != 0.0 {
                let re = 0.5 * (e1.re + e2.re);
                let im = 0.5 * (e1.im.abs() + e2.im.abs());
                (C64::new(re, im), C64::new(re, -im))
            } else {
                (e1, e2)
            };
            wr[l] = e1.re;
            wi[l] = e1.im;
            wr[iu] = e2.re;
            wi[iu] = e2.im;
        }
        kdefl = 0;
        i = l as isize - 1;
    }
    Ok(wr.into_iter().zip(wi).map(|(r, i)| C64::new(r, i)).collect())
}

/// Householder reflector `I − τ u uᵀ` with `u = (1, v[1..])` mapping `v` onto
/// `β e₁`. Overwrites `v[0]` with `β`, `v[1..]` with the tail of `u`; returns τ.
fn householder3(v: &mut [f64]) -> f64 {
    let alpha = v[0];
    let xnorm = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if xnorm == 0.0 {
        return 0.0;
    }
    let beta = -alpha.signum() * alpha.hypot(xnorm);
    let tau = (beta - alpha) / beta;
    let scal = 1.0 / (alpha - beta);
    for x in v[1..].iter_mut() {
        *x *= scal;
    }
    v[0] = beta;
    tau
}

/// Turns every nonzero subdiagonal entry of a quasi-triangular `t` into zero
/// with a unitary rotation, updating `z` so that `Z T Zᴴ` is preserved.
fn triangularize_blocks(t: &mut DenseMatrix, z: &mut DenseMatrix) {
    let n = t.rows();
    let mut i = 0;
    while i + 1 < n {
        if t[(i + 1, i)] == ZERO {
            i += 1;
            continue;
        }
        let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
        let (_, lambda) = eig2(a, b, c, d);
        // eigenvector for lambda, choosing the better conditioned formula
        let v1 = (b, lambda - a);
        let v2 = (lambda - d, c);
        let n1 = (v1.0.norm_sqr() + v1.1.norm_sqr()).sqrt();
        let n2 = (v2.0.norm_sqr() + v2.1.norm_sqr()).sqrt();
        let (x, y, nv) = if n1 >= n2 { (v1.0, v1.1, n1) } else { (v2.0, v2.1, n2) };
        if nv == 0.0 {
            i += 1;
            continue;
        }
        let (x, y) = (x / nv, y / nv);
        // G = [[x, -conj(y)], [y, conj(x)]], unitary with first column the eigenvector
        let (g00, g01, g10, g11) = (x, -y.conj(), y, x.conj());
        for j in i..n {
            let (p, q) = (t[(i, j)], t[(i + 1, j)]);
            t[(i, j)] = g00.conj() * p + g10.conj() * q;
            t[(i + 1, j)] = g01.conj() * p + g11.conj() * q;
        }
        for r in 0..(i + 2).min(n) {
            let (p, q) = (t[(r, i)], t[(r, i + 1)]);
            t[(r, i)] = p * g00 + q * g10;
            t[(r, i + 1)] = p * g01 + q * g11;
        }
        for r in 0..n {
            let (p, q) = (z[(r, i)], z[(r, i + 1)]);
            z[(r, i)] = p * g00 + q * g10;
            z[(r, i + 1)] = p * g01 + q * g11;
        }
        t[(i + 1, i)] = ZERO;
        i += 2;
    }
}

/// Complex Givens rotation `[c s; −s̄ c]` with `c` real, mapping `(f, g)` to `(r, 0)`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    if g == ZERO {
        return (1.0, ZERO);
    }
    if f == ZERO {
        return (0.0, g.conj() / g.norm());
    }
    let fa = f.norm();
    let gn = fa.hypot(g.norm());
    (fa / gn, (f / fa) * g.conj() / gn)
}

/// Single-shift QR iteration on a complex upper Hessenberg matrix.
fn complex_qr(h: &mut DenseMatrix, mut z: Option<&mut DenseMatrix>, want_t: bool) -> Result<()> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    for j in 0..n {
        for i in (j + 2)..n {
            h[(i, j)] = ZERO;
        }
    }
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let itmax = iteration_budget(n);
    let mut i = n as isize - 1;
    let mut kdefl = 0usize;
    let abs1 = |x: C64| x.re.abs() + x.im.abs();

    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut converged = false;
        for _its in 0..=itmax {
            let mut k = iu;
            while k > l {
                let hk = abs1(h[(k, k - 1)]);
                if hk <= smlnum {
                    break;
                }
                let mut tst = abs1(h[(k - 1, k - 1)]) + abs1(h[(k, k)]);
                if tst == 0.0 {
                    if k >= 2 {
                        tst += h[(k - 1, k - 2)].re.abs();
                    }
                    if k + 1 < n {
                        tst += h[(k + 1, k)].re.abs();
                    }
                }
                if hk <= ulp * tst {
                    let ab = hk.max(abs1(h[(k - 1, k)]));
                    let ba = hk.min(abs1(h[(k - 1, k)]));
                    let aa = abs1(h[(k, k)]).max(abs1(h[(k - 1, k - 1)] - h[(k, k)]));
                    let bb = abs1(h[(k, k)]).min(abs1(h[(k - 1, k - 1)] - h[(k, k)]));
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[(l, l - 1)] = ZERO;
            }
            if l >= iu {
                converged = true;
                break;
            }
            kdefl += 1;
            let (i1, i2) = if want_t { (0, n - 1) } else { (l, iu) };

            let shift = if kdefl.is_multiple_of(2 * EXCEPTIONAL_PERIOD) {
                h[(iu, iu)] + 0.75 * h[(iu, iu - 1)].re.abs()
            } else if kdefl.is_multiple_of(EXCEPTIONAL_PERIOD) {
                h[(l, l)] + 0.75 * h[(l + 1, l)].re.abs()
            } else {
                eig2(h[(iu - 1, iu - 1)], h[(iu - 1, iu)], h[(iu, iu - 1)], h[(iu, iu)]).0
            };

            let mut f = h[(l, l)] - shift;
            let mut g = h[(l + 1, l)];
            for k in l..iu {
                if k > l {
                    f = h[(k, k - 1)];
                    g = h[(k + 1, k - 1)];
                }
                let (c, s) = givens(f, g);
                if k > l {
                    h[(k, k - 1)] = c * f + s * g;
                    h[(k + 1, k - 1)] = ZERO;
                }
                for j in k.max(i1)..=i2 {
                    let (p, q) = (h[(k, j)], h[(k + 1, j)]);
                    h[(k, j)] = p * c + s * q;
                    h[(k + 1, j)] = -s.conj() * p + q * c;
                }
                let top = (k + 2).min(iu);
                for r in i1..=top {
                    let (p, q) = (h[(r, k)], h[(r, k + 1)]);
                    h[(r, k)] = p * c + q * s.conj();
                    h[(r, k + 1)] = -p * s + q * c;
                }
                if let Some(z) = z.as_deref_mut() {
                    for r in 0..n {
                        let (p, q) = (z[(r, k)], z[(r, k + 1)]);
                        z[(r, k)] = p * c + q * s.conj();
                        z[(r, k + 1)] = -p * s + q * c;
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                algorithm: "complex QR",
                iterations: itmax,
            });
        }
        kdefl = 0;
        i = l as isize - 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_schur(a: &DenseMatrix, tol: f64) -> SchurDecomposition {
        let s = schur(a).unwrap();
        let n = a.rows();
        assert!(s.t.is_upper_triangular());
        let defect = s.z.adjoint().matmul(&s.z).sub(&DenseMatrix::identity(n));
        assert!(defect.frobenius_norm() <= tol * n as f64, "{}", defect.frobenius_norm());
        let back = s.z.matmul(&s.t).matmul(&s.z.adjoint());
        let err = back.sub(a).frobenius_norm();
        assert!(err <= tol * a.frobenius_norm().max(1.0), "{err}");
        s
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let a = DenseMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let s = check_schur(&a, 1e-14);
        let mut ims: Vec<f64> = s.eigenvalues().iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_real_and_complex_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 3, 5, 12, 40] {
            let a = DenseMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
            check_schur(&a, 1e-12);
            let b = DenseMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            check_schur(&b, 1e-12);
        }
    }

    #[test]
    fn jordan_block_and_zero_matrix() {
        let j = DenseMatrix::from_real_rows(&[vec![2.0, 1.0, 0.0], vec![0.0, 2.0, 1.0], vec![0.0, 0.0, 2.0]]).unwrap();
        let s = check_schur(&j, 1e-14);
        for e in s.eigenvalues() {
            assert!((e - C64::new(2.0, 0.0)).norm() < 1e-12);
        }
        check_schur(&DenseMatrix::zeros(4, 4), 1e-14);
    }

    #[test]
    fn eigenvalue_only_path_matches_schur() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut h = DenseMatrix::from_fn(15, 15, |_, _| C64::new(rng.random_range(-2.0..2.0), 0.0));
        for j in 0..15 {
            for i in (j + 2)..15 {
                h[(i, j)] = ZERO;
            }
        }
        let fast = hessenberg_eigenvalues_unsorted(&h).unwrap();
        let full = schur(&h).unwrap().eigenvalues();
        for a in &fast {
            let d = full.iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10);
        }
    }
}
