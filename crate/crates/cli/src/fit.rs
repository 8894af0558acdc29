//! Log-spaced sampling and least-squares slopes on log-log data.

use crate::error::{invalid, CliResult};

/// About `points` integers from `lo` to `hi` inclusive, evenly spaced in
/// `log k`, deduplicated.
pub fn log_spaced(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    if hi <= lo || points < 2 {
        return vec![lo.min(hi)];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut ks: Vec<usize> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .map(|k| k.clamp(lo, hi))
        .collect();
    ks.dedup();
    ks
}

/// Least-squares slope of `y` on `x`; `None` with fewer than two distinct `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slopes of `log y` against `log k` over two windows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    /// Upper half of the sampled range, `k ≥ (k_min + k_max)/2`, which
    /// leaves out the pre-asymptotic start. This is the reported slope.
    pub second_half: f64,
    /// Every sample.
    pub full_range: f64,
}

fn midpoint(k: &[f64]) -> f64 {
    let (lo, hi) = k
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    0.5 * (lo + hi)
}

/// `(log k, log y)` for samples with `k >= cut` and `y > 0`.
fn log_window(k: &[f64], y: &[f64], cut: f64) -> (Vec<f64>, Vec<f64>) {
    k.iter()
        .zip(y)
        .filter(|(kk, v)| **kk >= cut && **v > 0.0)
        .map(|(kk, v)| (kk.ln(), v.ln()))
        .unzip()
}

pub fn fit_slopes(k: &[f64], y: &[f64]) -> CliResult<SlopeFit> {
    let window = |cut: f64| -> CliResult<f64> {
        let (x, yy) = log_window(k, y, cut);
        ls_slope(&x, &yy).ok_or_else(|| invalid("too few points to fit a slope"))
    };
    Ok(SlopeFit {
        second_half: window(midpoint(k))?,
        full_range: window(f64::NEG_INFINITY)?,
    })
}

/// One slope shared by several `(k, y)` series, each with its own
/// intercept, over the second half of each series' k-range.
pub fn pooled_slope(series: &[(Vec<f64>, Vec<f64>)]) -> CliResult<f64> {
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (k, y) in series {
        let (x, yy) = log_window(k, y, midpoint(k));
        if x.is_empty() {
            continue;
        }
        let mx = x.iter().sum::<f64>() / x.len() as f64;
        let my = yy.iter().sum::<f64>() / yy.len() as f64;
        sxx += x.iter().map(|a| (a - mx) * (a - mx)).sum::<f64>();
        sxy += x.iter().zip(&yy).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>();
    }
    if sxx > 0.0 {
        Ok(sxy / sxx)
    } else {
        Err(invalid("too few points to fit a slope"))
    }
}

/// About `points` integers from `lo` to `hi` inclusive, evenly spaced,
/// deduplicated.
pub fn lin_spaced(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    if hi <= lo || points < 2 {
        return vec![lo.min(hi)];
    }
    let mut ks: Vec<usize> = (0..points)
        .map(|i| lo + ((hi - lo) as f64 * i as f64 / (points - 1) as f64).round() as usize)
        .collect();
    ks.dedup();
    ks
}
