use super::{gaussian_real, rng, STREAM_PERTURB};
use crate::bounds::PerturbationData;
use crate::error::{Error, Result};
use crate::linalg::singular::DEFAULT_SIGMA_TOL;
use crate::linalg::{min_symmetric_eig, sigma_max, DenseMatrix, C64};

/// Hard cap on the shrink-and-retry loop.
pub const MAX_HALVINGS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationMode {
    HermitianRandom,
    SkewRandom,
}

impl PerturbationMode {
    pub fn name(self) -> &'static str {
        match self {
            PerturbationMode::HermitianRandom => "hermitian-random",
            PerturbationMode::SkewRandom => "skew-random",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "hermitian-random" => Some(PerturbationMode::HermitianRandom),
            "skew-random" => Some(PerturbationMode::SkewRandom),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationSpec {
    /// Relative spectral-norm budget `ε ≥ 0`.
    pub eps: f64,
    pub mode: PerturbationMode,
}

#[derive(Clone, Debug)]
pub struct PerturbedMatrix {
    pub matrix: DenseMatrix,
    /// Achieved `‖M̃ − M‖/‖M‖`, at most the requested `ε`.
    pub eps: f64,
    pub sigma_max: f64,
    /// `√λ_min((M + Mᴴ)/2)`.
    pub mu1: f64,
    /// `√λ_min((M̃ + M̃ᴴ)/2)`.
    pub mu2: f64,
    pub halvings: usize,
}

impl PerturbedMatrix {
    pub fn data(&self, b_norm: f64) -> PerturbationData {
        PerturbationData {
            sigma_max: self.sigma_max,
            mu1: self.mu1,
            mu2: self.mu2,
            eps: self.eps,
            b_norm,
        }
    }
}

/// `M̃ = M + E` with `E` a seeded random matrix of the requested symmetry,
/// scaled to `‖E‖ = ε‖M‖`. If `M̃` is not positive definite the budget is
/// halved, up to [`MAX_HALVINGS`] times.
pub fn perturb_matrix(m: &DenseMatrix, spec: &PerturbationSpec, seed: u64) -> Result<PerturbedMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    if !(spec.eps.is_finite() && spec.eps >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "eps must be nonnegative, got {}",
            spec.eps
        )));
    }
    let n = m.rows();
    let lmin = min_symmetric_eig(m)?;
    if lmin <= 0.0 {
        return Err(Error::InvalidSpectrum(format!(
            "matrix is not positive definite (min symmetric eigenvalue {lmin:e})"
        )));
    }
    let sigma = sigma_max(m, DEFAULT_SIGMA_TOL)?;
    if spec.eps == 0.0 {
        return Ok(PerturbedMatrix {
            matrix: m.clone(),
            eps: 0.0,
            sigma_max: sigma,
            mu1: lmin.sqrt(),
            mu2: lmin.sqrt(),
            halvings: 0,
        });
    }
    let r = gaussian_real(n, &mut rng(seed, STREAM_PERTURB));
    let sign = match spec.mode {
        PerturbationMode::HermitianRandom => 1.0,
        PerturbationMode::SkewRandom => -1.0,
    };
    let mut e = vec![0.0; n * n];
    for j in 0..n {
        for i in j..n {
            let v = (r[j * n + i] + sign * r[i * n + j]) / 2.0;
            e[j * n + i] = v;
            e[i * n + j] = sign * v;
        }
    }
    let e = DenseMatrix::from_real_col_major(n, n, &e);
    let e_norm = sigma_max(&e, DEFAULT_SIGMA_TOL)?;
    if e_norm == 0.0 {
        return Err(Error::InvalidInput("random perturbation vanished".into()));
    }
    let mut eps = spec.eps;
    for halvings in 0..=MAX_HALVINGS {
        let mt = m.add(&e.scaled(C64::new(eps * sigma / e_norm, 0.0)));
        let l2 = min_symmetric_eig(&mt)?;
        if l2 > 0.0 {
            return Ok(PerturbedMatrix {
                matrix: mt,
                eps,
                sigma_max: sigma,
                mu1: lmin.sqrt(),
                mu2: l2.sqrt(),
                halvings,
            });
        }
        eps /= 2.0;
    }
    Err(Error::PositivityLost { halvings: MAX_HALVINGS })
}
