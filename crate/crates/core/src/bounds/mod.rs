//! Error bounds for the Arnoldi approximation of `M^{1/2} b` and `M^{-1/2} b`.
//!
//! Every bound is proportional to the norm `‖ξ‖` of the FOM error
//! `M⁻¹b − x_k`, passed in as `xi_norm`.

pub mod quadrature;
pub mod special;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{HessenbergRows, RitzSpectrum, C64};
pub use quadrature::{quad_finite, quad_semi_infinite, QuadResult, QuadratureConfig};
pub use special::{beta_fn, gamma_fn, ln_gamma};

/// Which bound a stopping rule or report column refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    PosteriorRitz,
    PosteriorModulus,
    AprioriGamma,
    HermitianLoose,
    HermitianJensen,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::PosteriorRitz => "posterior_ritz",
            BoundKind::PosteriorModulus => "posterior_modulus",
            BoundKind::AprioriGamma => "apriori_gamma",
            BoundKind::HermitianLoose => "hermitian_loose",
            BoundKind::HermitianJensen => "hermitian_jensen",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            BoundKind::PosteriorRitz,
            BoundKind::PosteriorModulus,
            BoundKind::AprioriGamma,
            BoundKind::HermitianLoose,
            BoundKind::HermitianJensen,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Per-iteration record of residual, errors and bounds.
///
/// Bound fields are `None` when not evaluated at this `k` and `Some(+∞)` where
/// the bound is infinite (posterior and a priori square-root bounds at
/// `k = 1`). For the inverse square root, `apriori_gamma` and
/// `hermitian_jensen` hold the corresponding inverse-square-root bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub k: usize,
    pub residual_norm: f64,
    pub xi_norm: f64,
    pub error_norm: Option<f64>,
    pub posterior_ritz: Option<f64>,
    pub posterior_modulus: Option<f64>,
    pub apriori_gamma: Option<f64>,
    pub hermitian_loose: Option<f64>,
    pub hermitian_jensen: Option<f64>,
    pub lambda_bar: Option<f64>,
    pub sigma_max_used: Option<f64>,
}

impl BoundReport {
    pub fn bound(&self, kind: BoundKind) -> Option<f64> {
        match kind {
            BoundKind::PosteriorRitz => self.posterior_ritz,
            BoundKind::PosteriorModulus => self.posterior_modulus,
            BoundKind::AprioriGamma => self.apriori_gamma,
            BoundKind::HermitianLoose => self.hermitian_loose,
            BoundKind::HermitianJensen => self.hermitian_jensen,
        }
    }
}

fn check_xi(xi_norm: f64) -> Result<()> {
    if xi_norm.is_finite() && xi_norm >= 0.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "xi_norm must be finite and nonnegative, got {xi_norm}"
        )))
    }
}

fn check_pos(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("{what} must be positive, got {v}")))
    }
}

fn posterior_integral(k: usize, cfg: &QuadratureConfig, log_ratio: impl Fn(f64) -> f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::DivergentIntegral { k });
    }
    let r = quad_semi_infinite(|x| x.sqrt() * log_ratio(x).exp(), cfg)?;
    Ok(r.checked()? / PI)
}

/// `(1/π) ∫₀^∞ √x ∏ |λ_i/(λ_i + x)| dx · ‖ξ‖` over the Ritz values.
pub fn bound_posterior_ritz(ritz: &RitzSpectrum, xi_norm: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_xi(xi_norm)?;
    if let Some(bad) = ritz.values().iter().find(|z| z.re <= 0.0) {
        return Err(Error::InvalidSpectrum(format!(
            "Ritz value {bad} is not in the open right half-plane"
        )));
    }
    // |λ + x|²/|λ|² = 1 + (2x Re λ + x²)/|λ|²
    let terms: Vec<(f64, f64)> = ritz
        .values()
        .iter()
        .map(|z| (2.0 * z.re / z.norm_sqr(), 1.0 / z.norm_sqr()))
        .collect();
    let integral = posterior_integral(ritz.k(), cfg, |x| {
        -0.5 * terms.iter().map(|&(a, b)| (x * (a + x * b)).ln_1p()).sum::<f64>()
    })?;
    Ok(integral * xi_norm)
}

/// The same bound with `∏|λ_i/(λ_i + x)| = |det H| / |det(H + xI)|`, computed
/// by Hessenberg elimination instead of from the Ritz values.
pub fn bound_posterior_determinant(h: &HessenbergRows, xi_norm: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_xi(xi_norm)?;
    let base = h
        .log_det_shifted(C64::new(0.0, 0.0))
        .ok_or(Error::SingularProjectedMatrix)?
        .log_abs;
    let integral = posterior_integral(h.dim(), cfg, |x| match h.log_det_shifted(C64::new(-x, 0.0)) {
        Some(d) => base - d.log_abs,
        // H + xI numerically singular: the factor blows up, make the
        // quadrature report it
        None => f64::NAN,
    })?;
    Ok(integral * xi_norm)
}

/// `(1/π) ∫₀^∞ √x ∏ |λ_i|/√(|λ_i|² + x²) dx · ‖ξ‖`.
pub fn bound_posterior_modulus(ritz: &RitzSpectrum, xi_norm: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_xi(xi_norm)?;
    if ritz.values().iter().any(|z| z.norm() == 0.0) {
        return Err(Error::InvalidSpectrum("zero Ritz value".into()));
    }
    let inv2: Vec<f64> = ritz.values().iter().map(|z| 1.0 / z.norm_sqr()).collect();
    let integral = posterior_integral(ritz.k(), cfg, |x| {
        -0.5 * inv2.iter().map(|&b| (x * x * b).ln_1p()).sum::<f64>()
    })?;
    Ok(integral * xi_norm)
}

fn sqrt_constant() -> f64 {
    gamma_fn(0.75).expect("positive") / (2f64.powf(0.25) * PI)
}

/// `Γ(3/4)/(2^{1/4}π) · 2k/(2k−3) · σ^{3/2} k^{−3/4} · ‖ξ‖`, for `k ≥ 2`.
pub fn bound_apriori_sqrt(sigma_max: f64, k: usize, xi_norm: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::DomainError(format!("a priori bound needs k >= 2, got {k}")));
    }
    check_pos(sigma_max, "sigma_max")?;
    check_xi(xi_norm)?;
    let kf = k as f64;
    Ok(sqrt_constant() * (2.0 * kf / (2.0 * kf - 3.0)) * sigma_max.powf(1.5) * kf.powf(-0.75) * xi_norm)
}

/// `(Σ_{i≤k} λ_i + λ_max)/(k + 1)` for the `k` largest eigenvalues (or Ritz
/// values) in descending order.
pub fn lambda_bar(top_eigs: &[f64], lambda_max: f64, k: usize) -> Result<f64> {
    if top_eigs.len() != k || k == 0 {
        return Err(Error::DomainError(format!(
            "lambda_bar expects {k} >= 1 eigenvalues, got {}",
            top_eigs.len()
        )));
    }
    check_pos(lambda_max, "lambda_max")?;
    for (i, &l) in top_eigs.iter().enumerate() {
        check_pos(l, "eigenvalue")?;
        if i > 0 && l > top_eigs[i - 1] {
            return Err(Error::DomainError("eigenvalues must be sorted descending".into()));
        }
    }
    if top_eigs[0] > lambda_max {
        return Err(Error::DomainError(format!(
            "lambda_max {lambda_max} is below the largest eigenvalue {}",
            top_eigs[0]
        )));
    }
    Ok((top_eigs.iter().sum::<f64>() + lambda_max) / (k as f64 + 1.0))
}

fn hermitian_sqrt(lambda: f64, k: usize, xi_norm: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::DomainError("k must be at least 1".into()));
    }
    check_pos(lambda, "spectral constant")?;
    check_xi(xi_norm)?;
    let kf = k as f64;
    Ok(1.0 / (2.0 * PI.sqrt()) * (2.0 * kf / (2.0 * kf - 1.0)) * lambda.powf(1.5) * kf.powf(-1.5) * xi_norm)
}

/// `(1/(2√π)) · 2k/(2k−1) · λ_max^{3/2} k^{−3/2} · ‖ξ‖`.
pub fn bound_hermitian_loose(lambda_max: f64, k: usize, xi_norm: f64) -> Result<f64> {
    hermitian_sqrt(lambda_max, k, xi_norm)
}

/// The Hermitian bound with `λ̄_{k+1}` in place of `λ_max`.
pub fn bound_hermitian_jensen(lambda_bar_val: f64, k: usize, xi_norm: f64) -> Result<f64> {
    hermitian_sqrt(lambda_bar_val, k, xi_norm)
}

/// `Γ(1/4)/(2^{3/4}π) · 2k/(2k−1) · σ^{1/2} k^{−1/4} · ‖ξ‖` for the inverse
/// square root.
pub fn bound_apriori_invsqrt(sigma_max: f64, k: usize, xi_norm: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::DomainError("k must be at least 1".into()));
    }
    check_pos(sigma_max, "sigma_max")?;
    check_xi(xi_norm)?;
    let kf = k as f64;
    let c = gamma_fn(0.25)? / (2f64.powf(0.75) * PI);
    Ok(c * (2.0 * kf / (2.0 * kf - 1.0)) * sigma_max.sqrt() * kf.powf(-0.25) * xi_norm)
}

/// `(1/√π) · (2k+2)/(2k+1) · λ̄^{1/2} (k+1)^{−1/2} · ‖ξ‖` for the inverse
/// square root of a Hermitian matrix.
pub fn bound_hermitian_invsqrt(lambda_bar_val: f64, k: usize, xi_norm: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::DomainError("k must be at least 1".into()));
    }
    check_pos(lambda_bar_val, "lambda_bar")?;
    check_xi(xi_norm)?;
    let kf = k as f64;
    Ok((2.0 * kf + 2.0) / (2.0 * kf + 1.0) / PI.sqrt() * lambda_bar_val.sqrt() / (kf + 1.0).sqrt() * xi_norm)
}

/// Inputs to [`bound_perturbed`] describing the pair `(M, M̃)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationData {
    /// `σ_max(M)` of the unperturbed matrix.
    pub sigma_max: f64,
    /// `√λ_min((M + Mᴴ)/2)`.
    pub mu1: f64,
    /// `√λ_min((M̃ + M̃ᴴ)/2)`.
    pub mu2: f64,
    /// Relative perturbation size, `‖M − M̃‖ ≤ ε‖M‖`.
    pub eps: f64,
    pub b_norm: f64,
}

/// Bound on `‖M^{1/2}b − Arn_k(M̃)‖` when the Arnoldi process runs on the
/// perturbed matrix `M̃`:
/// `εσ/(μ₁+μ₂)‖b‖ + Γ(3/4)(1+ε)^{3/2}/(2^{1/4}π) · 2k/(2k−3) σ^{3/2} k^{−3/4} ‖ξ̃‖`.
/// Here `xi_norm` is the FOM error of the perturbed system `M̃x = b`.
pub fn bound_perturbed(p: &PerturbationData, k: usize, xi_norm: f64) -> Result<f64> {
    check_pos(p.mu1, "mu1")?;
    check_pos(p.mu2, "mu2")?;
    check_pos(p.b_norm, "b_norm")?;
    if !(p.eps.is_finite() && p.eps >= 0.0) {
        return Err(Error::DomainError(format!("eps must be nonnegative, got {}", p.eps)));
    }
    let first = p.eps * p.sigma_max / (p.mu1 + p.mu2) * p.b_norm;
    let second = (1.0 + p.eps).powf(1.5) * bound_apriori_sqrt(p.sigma_max, k, xi_norm)?;
    Ok(first + second)
}

/// `(2^{1/4}π/Γ(3/4)) · (2k−3)/(2k) · error/‖ξ‖`: the error with the a priori
/// constant divided out, to expose the `σ^{3/2} k^{−3/4}` behaviour.
pub fn scaling_term(error_norm: f64, xi_norm: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::DomainError(format!("scaling term needs k >= 2, got {k}")));
    }
    check_pos(xi_norm, "xi_norm")?;
    if !(error_norm.is_finite() && error_norm >= 0.0) {
        return Err(Error::DomainError(format!(
            "error must be nonnegative, got {error_norm}"
        )));
    }
    let kf = k as f64;
    Ok((2.0 * kf - 3.0) / (2.0 * kf) / sqrt_constant() * error_norm / xi_norm)
}
