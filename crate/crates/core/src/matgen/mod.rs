//! Seeded test matrices and right-hand sides.
//!
//! Every generator is a pure function of its arguments and a `u64` seed. Each
//! one draws from its own ChaCha8 stream (same seed, different stream id), so
//! changing how many numbers one generator consumes never shifts another.

pub mod perturb;
pub mod tridiagonal;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{qr_householder, DenseMatrix, C64};
pub use perturb::{perturb_matrix, PerturbationMode, PerturbationSpec, PerturbedMatrix};
pub use tridiagonal::{convection_diffusion, GridConvention, Tridiagonal, TridiagonalLu};

/// Eigenvalues are clamped from below to this floor.
pub const POSITIVITY_FLOOR: f64 = 1e-6;

const STREAM_ORTHOGONAL: u64 = 1;
const STREAM_SPECTRUM: u64 = 2;
const STREAM_SKEW: u64 = 3;
pub(crate) const STREAM_PERTURB: u64 = 4;

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub(crate) fn gaussian_real(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n * n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Real orthogonal `Q` from the QR factorization of a seeded Gaussian matrix,
/// with `R` normalized to a positive diagonal so `Q` is unique.
pub fn random_orthogonal(n: usize, seed: u64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let g = gaussian_real(n, &mut rng(seed, STREAM_ORTHOGONAL));
    let (q, _) = qr_householder(&DenseMatrix::from_real_col_major(n, n, &g))?;
    Ok(q)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectrumKind {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `round(cluster_fraction · n)` eigenvalues from
    /// `N(cluster_center, cluster_std²)`, the rest from
    /// `N(outlier_center, outlier_std²)`.
    Clustered {
        cluster_center: f64,
        cluster_std: f64,
        cluster_fraction: f64,
        outlier_center: f64,
        outlier_std: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumSpec {
    pub kind: SpectrumKind,
    pub n: usize,
}

impl SpectrumSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("spectrum dimension must be at least 1".into()));
        }
        let ok = match self.kind {
            SpectrumKind::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo,
            SpectrumKind::Clustered {
                cluster_center,
                cluster_std,
                cluster_fraction,
                outlier_center,
                outlier_std,
            } => {
                [cluster_center, cluster_std, outlier_center, outlier_std]
                    .iter()
                    .all(|v| v.is_finite())
                    && cluster_std >= 0.0
                    && outlier_std >= 0.0
                    && (0.0..=1.0).contains(&cluster_fraction)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid spectrum specification {self:?}")))
        }
    }

    /// The seeded eigenvalue draw, clamped to [`POSITIVITY_FLOOR`], in draw
    /// order.
    pub fn sample(&self, seed: u64) -> Result<Vec<f64>> {
        self.validate()?;
        let mut r = rng(seed, STREAM_SPECTRUM);
        let n = self.n;
        let raw: Vec<f64> = match self.kind {
            SpectrumKind::Uniform { lo, hi } => (0..n).map(|_| lo + (hi - lo) * r.random::<f64>()).collect(),
            SpectrumKind::Clustered {
                cluster_center,
                cluster_std,
                cluster_fraction,
                outlier_center,
                outlier_std,
            } => {
                let m = (cluster_fraction * n as f64).round() as usize;
                (0..n)
                    .map(|i| {
                        let z: f64 = StandardNormal.sample(&mut r);
                        if i < m {
                            cluster_center + cluster_std * z
                        } else {
                            outlier_center + outlier_std * z
                        }
                    })
                    .collect()
            }
        };
        Ok(raw.into_iter().map(|l| l.max(POSITIVITY_FLOOR)).collect())
    }
}

/// `M₀ = Q diag(Λ) Qᵀ` with its eigendecomposition.
#[derive(Clone, Debug)]
pub struct SpectrumMatrix {
    pub matrix: DenseMatrix,
    /// Eigenvalues in descending order.
    pub eigs: Vec<f64>,
    /// Orthogonal eigenvectors, column `j` belonging to `eigs[j]`.
    pub q: DenseMatrix,
}

/// Symmetric positive definite `Q diag(Λ) Qᵀ` with `Λ` drawn from `spec` and
/// `Q` from [`random_orthogonal`]. The matrix is exactly symmetric.
pub fn spectrum_matrix(spec: &SpectrumSpec, seed: u64) -> Result<SpectrumMatrix> {
    let mut eigs = spec.sample(seed)?;
    eigs.sort_by(|a, b| b.total_cmp(a));
    let n = spec.n;
    let q = random_orthogonal(n, seed)?;
    let qr: Vec<f64> = q.as_slice().iter().map(|z| z.re).collect();
    let mut m = vec![0.0; n * n];
    // lower triangle of Σ_k λ_k q_k q_kᵀ, then mirrored
    for (k, &lam) in eigs.iter().enumerate() {
        let col = &qr[k * n..(k + 1) * n];
        for j in 0..n {
            let s = lam * col[j];
            if s == 0.0 {
                continue;
            }
            let mj = &mut m[j * n..(j + 1) * n];
            for i in j..n {
                mj[i] += s * col[i];
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            m[i * n + j] = m[j * n + i];
        }
    }
    Ok(SpectrumMatrix {
        matrix: DenseMatrix::from_real_col_major(n, n, &m),
        eigs,
        q,
    })
}

/// `K = scale · (R − Rᵀ)/2` with `R` seeded standard Gaussian; exactly
/// skew-symmetric.
pub fn skew_part(n: usize, seed: u64, scale: f64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if !scale.is_finite() {
        return Err(Error::InvalidInput(format!("skew scale must be finite, got {scale}")));
    }
    let r = gaussian_real(n, &mut rng(seed, STREAM_SKEW));
    let mut k = vec![0.0; n * n];
    for j in 0..n {
        for i in j + 1..n {
            let v = scale * (r[j * n + i] - r[i * n + j]) / 2.0;
            k[j * n + i] = v;
            k[i * n + j] = -v;
        }
    }
    Ok(DenseMatrix::from_real_col_major(n, n, &k))
}

/// Right-hand side choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhsKind {
    Ones,
    /// Unit-norm average of the eigenvectors of the `count` eigenvalues of
    /// largest magnitude.
    EigAverage(usize),
}

/// The right-hand side of dimension `n`. `EigAverage` needs a spectrum-known
/// construction to take eigenvectors from.
pub fn rhs_vector(kind: RhsKind, n: usize, spectral: Option<&SpectrumMatrix>) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    match kind {
        RhsKind::Ones => Ok(vec![C64::new(1.0, 0.0); n]),
        RhsKind::EigAverage(count) => {
            let s = spectral.ok_or_else(|| {
                Error::UnsupportedContext("eig_average needs a matrix with known eigenvectors".into())
            })?;
            if s.q.rows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: s.q.rows(),
                });
            }
            if count == 0 || count > n {
                return Err(Error::InvalidInput(format!("eigenvector count {count} not in 1..={n}")));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| s.eigs[b].abs().total_cmp(&s.eigs[a].abs()).then(a.cmp(&b)));
            let mut v = vec![C64::new(0.0, 0.0); n];
            for &j in &order[..count] {
                for (vi, qi) in v.iter_mut().zip(s.q.col(j)) {
                    *vi += qi;
                }
            }
            let norm = crate::linalg::vector::norm2(&v);
            if norm == 0.0 {
                return Err(Error::InvalidInput("averaged eigenvectors cancel".into()));
            }
            Ok(v.into_iter().map(|x| x / norm).collect())
        }
    }
}
