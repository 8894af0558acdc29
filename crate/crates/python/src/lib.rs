//! Python bindings: dense matrices, the adaptive Arnoldi approximation of
//! `f(M)b` with its bound history, reference actions and the scalar bounds.

use krylov_sqrt::arnoldi::{
    run_adaptive, AdaptiveOptions, AdaptiveOutcome, FunctionKind, StopStatus, StoppingRule, XiSource,
};
use krylov_sqrt::bounds::{self, BoundKind, BoundReport, QuadratureConfig};
use krylov_sqrt::linalg::{
    eigenvalues, lu_solve, reference_invsqrt_action, reference_sqrt_action, DenseMatrix, RitzSpectrum, C64,
};
use krylov_sqrt::matgen::{
    convection_diffusion, skew_part, spectrum_matrix, GridConvention, SpectrumKind, SpectrumSpec,
};
use krylov_sqrt::mmio::read_matrix_market_file;
use krylov_sqrt::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

create_exception!(krylov_sqrt, NumericalError, PyArithmeticError);
create_exception!(krylov_sqrt, BudgetExhausted, PyArithmeticError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::UnsupportedContext(_)
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::TooLarge { .. }
        | Error::DomainError(_) => PyValueError::new_err(e.to_string()),
        Error::BudgetExhausted { .. } => BudgetExhausted::new_err(e.to_string()),
        _ => NumericalError::new_err(e.to_string()),
    }
}

/// Dense complex matrix.
#[pyclass(name = "Matrix", module = "krylov_sqrt", skip_from_py_object)]
#[derive(Clone)]
struct PyMatrix {
    inner: DenseMatrix,
}

#[pymethods]
impl PyMatrix {
    /// From a list of rows of real or complex numbers.
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        Ok(Self {
            inner: DenseMatrix::from_rows(&rows).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self {
            inner: DenseMatrix::identity(n),
        }
    }

    /// Upwind convection-diffusion matrix on `n` grid cells, as a dense matrix.
    #[staticmethod]
    #[pyo3(signature = (n, eta, grid = "full"))]
    fn convection_diffusion(n: usize, eta: f64, grid: &str) -> PyResult<Self> {
        let g =
            GridConvention::from_name(grid).ok_or_else(|| PyValueError::new_err(format!("unknown grid '{grid}'")))?;
        Ok(Self {
            inner: convection_diffusion(n, eta, g).map_err(py_err)?.to_dense(),
        })
    }

    /// `Q diag(λ) Qᵀ` with `λ` uniform on `[lo, hi]`, plus a seeded skew part
    /// of the given scale.
    #[staticmethod]
    #[pyo3(signature = (n, lo, hi, seed = 0, skew_scale = 0.0))]
    fn uniform_spectrum(n: usize, lo: f64, hi: f64, seed: u64, skew_scale: f64) -> PyResult<Self> {
        let spec = SpectrumSpec {
            kind: SpectrumKind::Uniform { lo, hi },
            n,
        };
        let mut m = spectrum_matrix(&spec, seed).map_err(py_err)?.matrix;
        if skew_scale != 0.0 {
            m = m.add(&skew_part(n, seed, skew_scale).map_err(py_err)?);
        }
        Ok(Self { inner: m })
    }

    #[staticmethod]
    fn read_mtx(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: read_matrix_market_file(&path).map_err(py_err)?,
        })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        (0..self.inner.rows()).map(|i| self.inner.row(i)).collect()
    }

    fn matvec(&self, x: Vec<C64>) -> PyResult<Vec<C64>> {
        if x.len() != self.inner.cols() {
            return Err(py_err(Error::DimensionMismatch {
                expected: self.inner.cols(),
                got: x.len(),
            }));
        }
        Ok(self.inner.matvec(&x))
    }

    fn eigenvalues(&self) -> PyResult<Vec<C64>> {
        Ok(eigenvalues(&self.inner).map_err(py_err)?.into_values())
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// Residual, errors and bounds at one Arnoldi step. Bounds that were not
/// evaluated are `None`; infinite bounds are `inf`.
#[pyclass(name = "BoundReport", module = "krylov_sqrt", get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyBoundReport {
    k: usize,
    residual_norm: f64,
    xi_norm: f64,
    error_norm: Option<f64>,
    posterior_ritz: Option<f64>,
    posterior_modulus: Option<f64>,
    apriori_gamma: Option<f64>,
    hermitian_loose: Option<f64>,
    hermitian_jensen: Option<f64>,
    lambda_bar: Option<f64>,
}

impl From<&BoundReport> for PyBoundReport {
    fn from(r: &BoundReport) -> Self {
        Self {
            k: r.k,
            residual_norm: r.residual_norm,
            xi_norm: r.xi_norm,
            error_norm: r.error_norm,
            posterior_ritz: r.posterior_ritz,
            posterior_modulus: r.posterior_modulus,
            apriori_gamma: r.apriori_gamma,
            hermitian_loose: r.hermitian_loose,
            hermitian_jensen: r.hermitian_jensen,
            lambda_bar: r.lambda_bar,
        }
    }
}

#[pymethods]
impl PyBoundReport {
    fn __repr__(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "None".to_string(), |x| format!("{x:e}"));
        format!(
            "BoundReport(k={}, residual_norm={:e}, error_norm={}, posterior_ritz={})",
            self.k,
            self.residual_norm,
            opt(self.error_norm),
            opt(self.posterior_ritz)
        )
    }
}

/// Outcome of [`approximate`].
#[pyclass(name = "Approximation", module = "krylov_sqrt", get_all)]
struct PyApproximation {
    result: Vec<C64>,
    k: usize,
    /// `"rule_satisfied"`, `"breakdown"` or `"budget_exhausted"`.
    status: &'static str,
    history: Vec<PyBoundReport>,
}

impl From<AdaptiveOutcome> for PyApproximation {
    fn from(o: AdaptiveOutcome) -> Self {
        Self {
            status: match o.status {
                StopStatus::RuleSatisfied => "rule_satisfied",
                StopStatus::Breakdown => "breakdown",
                StopStatus::BudgetExhausted => "budget_exhausted",
            },
            history: o.history.iter().map(PyBoundReport::from).collect(),
            result: o.result,
            k: o.k,
        }
    }
}

fn function_kind(f: &str) -> PyResult<FunctionKind> {
    FunctionKind::from_name(f).ok_or_else(|| PyValueError::new_err(format!("unknown function '{f}'")))
}

/// Adaptive Arnoldi approximation of `f(M)b`.
///
/// `rule` is `"residual"` (relative FOM residual) or a bound name such as
/// `"posterior_ritz"`, in which case iteration stops once that bound is at
/// most `tol`. With `reference=True` the exact `f(M)b` is formed densely
/// and every report carries the true error. `strict=True` raises
/// `BudgetExhausted` instead of returning the last iterate.
#[pyfunction]
#[pyo3(signature = (m, b, f = "sqrt", tol = 1e-2, rule = "residual", k_max = 100, reference = false, strict = false))]
#[allow(clippy::too_many_arguments)]
fn approximate(
    m: &PyMatrix,
    b: Vec<C64>,
    f: &str,
    tol: f64,
    rule: &str,
    k_max: usize,
    reference: bool,
    strict: bool,
) -> PyResult<PyApproximation> {
    let f = function_kind(f)?;
    let stop = match rule {
        "residual" => StoppingRule::ResidualRelative(tol),
        name => StoppingRule::BoundAbsolute {
            tol,
            kind: BoundKind::from_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown rule '{name}'")))?,
        },
    };
    let x = lu_solve(&m.inner, &b).map_err(py_err)?;
    let mut opts = AdaptiveOptions::new(f, stop, k_max, XiSource::Exact(x));
    if reference {
        let r = match f {
            FunctionKind::InvSqrt => reference_invsqrt_action(&m.inner, &b),
            _ => reference_sqrt_action(&m.inner, &b),
        };
        opts.reference = Some(r.map_err(py_err)?);
    }
    let out = run_adaptive(&m.inner, &b, &opts).map_err(py_err)?;
    if strict {
        out.require_converged().map_err(py_err)?;
    }
    Ok(out.into())
}

/// `M^{1/2} b` from a dense Schur square root.
#[pyfunction]
fn sqrt_action(m: &PyMatrix, b: Vec<C64>) -> PyResult<Vec<C64>> {
    reference_sqrt_action(&m.inner, &b).map_err(py_err)
}

/// `M^{-1/2} b` from a dense Schur square root.
#[pyfunction]
fn invsqrt_action(m: &PyMatrix, b: Vec<C64>) -> PyResult<Vec<C64>> {
    reference_invsqrt_action(&m.inner, &b).map_err(py_err)
}

#[pyfunction]
fn bound_posterior_ritz(ritz: Vec<C64>, xi_norm: f64) -> PyResult<f64> {
    bounds::bound_posterior_ritz(&RitzSpectrum::new(ritz), xi_norm, &QuadratureConfig::default()).map_err(py_err)
}

#[pyfunction]
fn bound_posterior_modulus(ritz: Vec<C64>, xi_norm: f64) -> PyResult<f64> {
    bounds::bound_posterior_modulus(&RitzSpectrum::new(ritz), xi_norm, &QuadratureConfig::default()).map_err(py_err)
}

#[pyfunction]
fn bound_apriori_sqrt(sigma_max: f64, k: usize, xi_norm: f64) -> PyResult<f64> {
    bounds::bound_apriori_sqrt(sigma_max, k, xi_norm).map_err(py_err)
}

#[pyfunction]
fn bound_hermitian_loose(lambda_max: f64, k: usize, xi_norm: f64) -> PyResult<f64> {
    bounds::bound_hermitian_loose(lambda_max, k, xi_norm).map_err(py_err)
}

#[pyfunction]
fn bound_hermitian_jensen(lambda_bar: f64, k: usize, xi_norm: f64) -> PyResult<f64> {
    bounds::bound_hermitian_jensen(lambda_bar, k, xi_norm).map_err(py_err)
}

#[pyfunction]
fn scaling_term(error_norm: f64, xi_norm: f64, k: usize) -> PyResult<f64> {
    bounds::scaling_term(error_norm, xi_norm, k).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "krylov_sqrt")]
fn krylov_sqrt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyBoundReport>()?;
    m.add_class::<PyApproximation>()?;
    m.add_function(wrap_pyfunction!(approximate, m)?)?;
    m.add_function(wrap_pyfunction!(sqrt_action, m)?)?;
    m.add_function(wrap_pyfunction!(invsqrt_action, m)?)?;
    m.add_function(wrap_pyfunction!(bound_posterior_ritz, m)?)?;
    m.add_function(wrap_pyfunction!(bound_posterior_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(bound_apriori_sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(bound_hermitian_loose, m)?)?;
    m.add_function(wrap_pyfunction!(bound_hermitian_jensen, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_term, m)?)?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add("BudgetExhausted", m.py().get_type::<BudgetExhausted>())?;
    Ok(())
}
