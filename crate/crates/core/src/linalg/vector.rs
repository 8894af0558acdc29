//! Small helpers on complex vectors stored as slices.

use super::dense::{C64, ZERO};

/// Conjugated inner product `x^H y`.
#[inline]
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    let (mut re, mut im) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    C64::new(re, im)
}

#[inline]
pub fn norm2(x: &[C64]) -> f64 {
    // scaled accumulation is unnecessary at the magnitudes seen here
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += a x`.
#[inline]
pub fn axpy(a: C64, x: &[C64], y: &mut [C64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub fn scale(a: C64, x: &mut [C64]) {
    for xi in x {
        *xi *= a;
    }
}

pub fn sub(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn from_real(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}

pub fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut e = vec![ZERO; n];
    e[i] = C64::new(1.0, 0.0);
    e
}

pub fn all_finite(x: &[C64]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `‖x − y‖ / ‖y‖`, or the absolute difference when `y` vanishes.
pub fn relative_error(x: &[C64], y: &[C64]) -> f64 {
    let d = norm2(&sub(x, y));
    let s = norm2(y);
    if s == 0.0 {
        d
    } else {
        d / s
    }
}
