//! Real tridiagonal matrices: operator, banded LU and the upwind
//! convection–diffusion discretization.

use crate::error::{Error, Result};
use crate::linalg::{tridiagonal_eigen, DenseMatrix, LinearOperator, LinearSolver, C64};

/// A real `n × n` tridiagonal matrix in banded storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    /// `a_{i+1,i}`, length `n − 1`.
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    /// `a_{i,i+1}`, length `n − 1`.
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidInput("tridiagonal matrix must be nonempty".into()));
        }
        for band in [&sub, &sup] {
            if band.len() != n - 1 {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    got: band.len(),
                });
            }
        }
        if !sub.iter().chain(&diag).chain(&sup).all(|v| v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                context: "tridiagonal matrix",
            });
        }
        Ok(Self { sub, diag, sup })
    }

    /// Constant bands.
    pub fn toeplitz(n: usize, sub: f64, diag: f64, sup: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("tridiagonal matrix must be nonempty".into()));
        }
        Self::new(vec![sub; n - 1], vec![diag; n], vec![sup; n - 1])
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n();
        DenseMatrix::from_fn(n, n, |i, j| {
            C64::new(
                if i == j {
                    self.diag[i]
                } else if i == j + 1 {
                    self.sub[j]
                } else if j == i + 1 {
                    self.sup[i]
                } else {
                    0.0
                },
                0.0,
            )
        })
    }

    pub fn transpose(&self) -> Self {
        Self {
            sub: self.sup.clone(),
            diag: self.diag.clone(),
            sup: self.sub.clone(),
        }
    }

    /// `(M + Mᵀ)/2` as diagonal and off-diagonal bands.
    pub fn symmetric_part(&self) -> (Vec<f64>, Vec<f64>) {
        let off = self.sub.iter().zip(&self.sup).map(|(a, c)| 0.5 * (a + c)).collect();
        (self.diag.clone(), off)
    }

    pub fn lu(&self) -> Result<TridiagonalLu> {
        TridiagonalLu::new(self)
    }

    /// `f(M) b` for a tridiagonal matrix with `a_{i+1,i} a_{i,i+1} > 0`.
    ///
    /// Such a matrix is `D S D⁻¹` with `S` symmetric tridiagonal and `D`
    /// diagonal, so `f(M) b = D V f(Λ) Vᵀ D⁻¹ b` from the eigendecomposition
    /// `S = V Λ Vᵀ`. `f` must be defined on the (real) spectrum.
    pub fn symmetrizable_fun_action(&self, b: &[C64], f: impl Fn(f64) -> f64) -> Result<Vec<C64>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        if self.sub.iter().zip(&self.sup).any(|(a, c)| a * c <= 0.0) {
            return Err(Error::UnsupportedContext(
                "off-diagonal products must be positive for the symmetrized oracle".into(),
            ));
        }
        // log-scale D to keep long products in range
        let mut log_d = vec![0.0; n];
        for i in 0..n - 1 {
            log_d[i + 1] = log_d[i] + 0.5 * (self.sub[i].abs().ln() - self.sup[i].abs().ln());
        }
        let shift = log_d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let d: Vec<f64> = log_d.iter().map(|l| (l - shift).exp()).collect();
        let off: Vec<f64> = self
            .sub
            .iter()
            .zip(&self.sup)
            .map(|(a, c)| a.signum() * (a * c).sqrt())
            .collect();
        let (lam, v) = tridiagonal_eigen(&self.diag, &off)?;
        let fl: Vec<f64> = lam.iter().map(|&l| f(l)).collect();
        if fl.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum("function undefined on the spectrum".into()));
        }
        let y: Vec<C64> = b.iter().zip(&d).map(|(bi, di)| bi / di).collect();
        let mut coef = vec![C64::new(0.0, 0.0); n];
        for (j, c) in coef.iter_mut().enumerate() {
            let col = &v[j * n..(j + 1) * n];
            let s: C64 = col.iter().zip(&y).map(|(vi, yi)| yi * vi).sum();
            *c = s * fl[j];
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (j, c) in coef.iter().enumerate() {
            let col = &v[j * n..(j + 1) * n];
            for (o, vi) in out.iter_mut().zip(col) {
                *o += c * vi;
            }
        }
        for (o, di) in out.iter_mut().zip(&d) {
            *o *= di;
        }
        Ok(out)
    }
}

impl LinearOperator for Tridiagonal {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.n();
        for i in 0..n {
            let mut s = x[i] * self.diag[i];
            if i > 0 {
                s += x[i - 1] * self.sub[i - 1];
            }
            if i + 1 < n {
                s += x[i + 1] * self.sup[i];
            }
            y[i] = s;
        }
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        let n = self.n();
        for i in 0..n {
            let mut s = x[i] * self.diag[i];
            if i > 0 {
                s += x[i - 1] * self.sup[i - 1];
            }
            if i + 1 < n {
                s += x[i + 1] * self.sub[i];
            }
            y[i] = s;
        }
    }

    fn is_real(&self) -> bool {
        true
    }
}

/// LU factorization with partial pivoting of a tridiagonal matrix; `U` gains
/// a second superdiagonal from row swaps.
#[derive(Clone, Debug)]
pub struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    pub fn new(t: &Tridiagonal) -> Result<Self> {
        let n = t.n();
        let mut dl = t.sub.clone();
        let mut d = t.diag.clone();
        let mut du = t.sup.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale = t
            .diag
            .iter()
            .chain(&t.sub)
            .chain(&t.sup)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let threshold = crate::linalg::lu::PIVOT_TOL * scale;
        if let Some(p) = d.iter().find(|p| p.abs() <= threshold) {
            return Err(Error::SingularMatrix {
                pivot: p.abs(),
                threshold,
            });
        }
        Ok(Self {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }

    fn n(&self) -> usize {
        self.d.len()
    }
}

impl LinearSolver for TridiagonalLu {
    fn dim(&self) -> usize {
        self.n()
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut x = b.to_vec();
        // L solve with the recorded interchanges
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - x[i] * self.dl[i];
            } else {
                let xi = x[i];
                x[i + 1] -= xi * self.dl[i];
            }
        }
        // U solve
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= x[i + 1] * self.du[i];
            }
            if i + 2 < n {
                s -= x[i + 2] * self.du2[i];
            }
            x[i] = s / self.d[i];
        }
        x
    }

    fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        // Aᵀ = Uᵀ Lᵀ P: solve Uᵀ y = b, then Lᵀ with interchanges in reverse
        let n = self.n();
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            if i >= 1 {
                s -= x[i - 1] * self.du[i - 1];
            }
            if i >= 2 {
                s -= x[i - 2] * self.du2[i - 2];
            }
            x[i] = s / self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            if self.swapped[i] {
                let temp = x[i + 1];
                x[i + 1] = x[i] - temp * self.dl[i];
                x[i] = temp;
            } else {
                let xi1 = x[i + 1];
                x[i] -= xi1 * self.dl[i];
            }
        }
        x
    }
}

/// How grid size `n` maps to unknowns in [`convection_diffusion`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GridConvention {
    /// `n` unknowns, `h = 1/n`.
    #[default]
    Full,
    /// `n − 1` interior unknowns of the grid `x_0, …, x_n`, `h = 1/n`.
    Interior,
}

impl GridConvention {
    pub fn name(self) -> &'static str {
        match self {
            GridConvention::Full => "full",
            GridConvention::Interior => "interior",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "full" => Some(GridConvention::Full),
            "interior" => Some(GridConvention::Interior),
            _ => None,
        }
    }
}

/// Upwind discretization of `−η u″ + u′` on `(0, 1)` with homogeneous
/// Dirichlet conditions and `h = 1/n`:
/// sub-diagonal `−η/h² − 1/h`, diagonal `2η/h² + 1/h`, super-diagonal `−η/h²`.
pub fn convection_diffusion(n: usize, eta: f64, convention: GridConvention) -> Result<Tridiagonal> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("grid count must be at least 3, got {n}")));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidInput(format!("eta must be positive, got {eta}")));
    }
    let h = 1.0 / n as f64;
    let unknowns = match convention {
        GridConvention::Full => n,
        GridConvention::Interior => n - 1,
    };
    let diff = eta / (h * h);
    Tridiagonal::toeplitz(unknowns, -diff - 1.0 / h, 2.0 * diff + 1.0 / h, -diff)
}
