//! Matrix, right-hand side and oracles for one run.

use krylov_sqrt::arnoldi::{FunctionKind, HermitianInfo};
use krylov_sqrt::linalg::singular::DEFAULT_SIGMA_TOL;
use krylov_sqrt::linalg::sqrtm::DENSE_ORACLE_LIMIT;
use krylov_sqrt::linalg::{
    reference_invsqrt_action, reference_sqrt_action, sigma_max, DenseMatrix, LinearOperator, LinearSolver,
    LuFactorization, C64,
};
use krylov_sqrt::matgen::{convection_diffusion, rhs_vector, skew_part, spectrum_matrix, SpectrumMatrix, Tridiagonal};
use krylov_sqrt::mmio::read_matrix_market_file;

use crate::config::{MatrixConfig, RhsConfig};
use crate::error::{invalid, CliResult};

#[derive(Clone, Debug)]
pub enum Operator {
    Dense(DenseMatrix),
    Tridiagonal(Tridiagonal),
}

impl LinearOperator for Operator {
    fn dim(&self) -> usize {
        match self {
            Operator::Dense(m) => m.rows(),
            Operator::Tridiagonal(t) => t.n(),
        }
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match self {
            Operator::Dense(m) => m.apply(x, y),
            Operator::Tridiagonal(t) => t.apply(x, y),
        }
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        match self {
            Operator::Dense(m) => m.apply_adjoint(x, y),
            Operator::Tridiagonal(t) => t.apply_adjoint(x, y),
        }
    }

    fn is_real(&self) -> bool {
        match self {
            Operator::Dense(m) => m.is_real(),
            Operator::Tridiagonal(_) => true,
        }
    }
}

impl Operator {
    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Tridiagonal(t) => t.to_dense(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub op: Operator,
    pub b: Vec<C64>,
    /// Eigendecomposition of the symmetric part when generated from a spectrum.
    pub spectral: Option<SpectrumMatrix>,
    /// The matrix equals its spectrum construction (no skew part), so its
    /// eigenvalues are known exactly.
    pub hermitian_known: bool,
}

impl Problem {
    pub fn build(matrix: &MatrixConfig, rhs: RhsConfig, seed: u64) -> CliResult<Self> {
        let (op, spectral, hermitian_known) = match matrix {
            MatrixConfig::Spectrum { skew_scale, .. } => {
                let spec = matrix.spectrum_spec().expect("spectrum");
                let sm = spectrum_matrix(&spec, seed)?;
                let mut m = sm.matrix.clone();
                if *skew_scale != 0.0 {
                    m = m.add(&skew_part(spec.n, seed, *skew_scale)?);
                }
                (Operator::Dense(m), Some(sm), *skew_scale == 0.0)
            }
            MatrixConfig::ConvectionDiffusion { n, eta, grid } => (
                Operator::Tridiagonal(convection_diffusion(*n, *eta, (*grid).into())?),
                None,
                false,
            ),
            MatrixConfig::File { path } => {
                let m = read_matrix_market_file(path)?;
                if !m.is_square() {
                    return Err(invalid(format!(
                        "{}: matrix is {}x{}, not square",
                        path.display(),
                        m.rows(),
                        m.cols()
                    )));
                }
                (Operator::Dense(m), None, false)
            }
        };
        let b = rhs_vector(rhs.into(), op.dim(), spectral.as_ref())?;
        Ok(Self {
            op,
            b,
            spectral,
            hermitian_known,
        })
    }

    pub fn n(&self) -> usize {
        self.op.dim()
    }

    /// `M⁻¹ v` by LU.
    pub fn solve(&self, v: &[C64]) -> CliResult<Vec<C64>> {
        Ok(match &self.op {
            Operator::Dense(m) => LuFactorization::new(m)?.solve(v),
            Operator::Tridiagonal(t) => t.lu()?.solve(v),
        })
    }

    /// `f(M) b` from the most accurate route available.
    pub fn reference(&self, f: FunctionKind) -> CliResult<Vec<C64>> {
        let scalar = |x: f64| match f {
            FunctionKind::Sqrt => x.sqrt(),
            FunctionKind::InvSqrt => 1.0 / x.sqrt(),
            FunctionKind::Inverse => 1.0 / x,
        };
        if f == FunctionKind::Inverse {
            return self.solve(&self.b);
        }
        if let (true, Some(s)) = (self.hermitian_known, &self.spectral) {
            return Ok(spectral_action(s, &self.b, scalar));
        }
        if let Operator::Tridiagonal(t) = &self.op {
            if t.sub.iter().zip(&t.sup).all(|(a, c)| a * c > 0.0) {
                return Ok(t.symmetrizable_fun_action(&self.b, scalar)?);
            }
        }
        let m = self.op.to_dense();
        Ok(match f {
            FunctionKind::Sqrt => reference_sqrt_action(&m, &self.b)?,
            _ => reference_invsqrt_action(&m, &self.b)?,
        })
    }

    pub fn sigma_max(&self) -> CliResult<f64> {
        if let (true, Some(s)) = (self.hermitian_known, &self.spectral) {
            return Ok(s.eigs[0]);
        }
        Ok(sigma_max(&self.op, DEFAULT_SIGMA_TOL)?)
    }

    /// Known spectrum for the Hermitian bounds, if the matrix is Hermitian by
    /// construction.
    pub fn hermitian_info(&self) -> Option<HermitianInfo> {
        match (self.hermitian_known, &self.spectral) {
            (true, Some(s)) => Some(HermitianInfo {
                lambda_max: s.eigs[0],
                top_eigs: Some(s.eigs.clone()),
            }),
            _ => None,
        }
    }

    /// Refuses dense-oracle sizes unless the oracle is off.
    pub fn check_oracle_size(&self, oracle: bool) -> CliResult<()> {
        if oracle && self.n() > DENSE_ORACLE_LIMIT {
            return Err(invalid(format!(
                "n = {} exceeds the oracle limit {DENSE_ORACLE_LIMIT}; pass --no-oracle to drop the error column",
                self.n()
            )));
        }
        Ok(())
    }
}

/// `Q f(Λ) Qᵀ b` from an exact eigendecomposition.
pub fn spectral_action(s: &SpectrumMatrix, b: &[C64], f: impl Fn(f64) -> f64) -> Vec<C64> {
    let n = b.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (j, &lam) in s.eigs.iter().enumerate() {
        let q = s.q.col(j);
        let c: C64 = q.iter().zip(b).map(|(qi, bi)| qi.conj() * bi).sum::<C64>() * f(lam);
        for (o, qi) in out.iter_mut().zip(q) {
            *o += c * qi;
        }
    }
    out
}
