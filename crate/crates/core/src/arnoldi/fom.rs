//! Function actions on the Krylov space and FOM residual/error quantities.

use super::decomposition::ArnoldiView;
use crate::error::{Error, Result};
use crate::linalg::lu::hessenberg_solve;
use crate::linalg::vector::{norm2, sub, unit};
use crate::linalg::{DenseMatrix, HessenbergRows, LinearSolver, LuFactorization, SchurSqrt, C64};

/// The scalar function whose matrix action is approximated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    Sqrt,
    InvSqrt,
    Inverse,
}

impl FunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Sqrt => "sqrt",
            FunctionKind::InvSqrt => "invsqrt",
            FunctionKind::Inverse => "inverse",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "sqrt" => Some(FunctionKind::Sqrt),
            "invsqrt" => Some(FunctionKind::InvSqrt),
            "inverse" => Some(FunctionKind::Inverse),
            _ => None,
        }
    }
}

fn check_k(view: &ArnoldiView<'_>) -> Result<()> {
    if view.k() == 0 {
        Err(Error::InvalidInput("no Arnoldi steps have been taken".into()))
    } else {
        Ok(())
    }
}

/// `‖b‖ f(H_k) e_1`, the coefficients of the approximation in the basis `Q_k`.
pub fn projected_fun_action(view: &ArnoldiView<'_>, f: FunctionKind) -> Result<Vec<C64>> {
    check_k(view)?;
    let h = view.hessenberg();
    let e1 = unit(view.k(), 0);
    let mut y = match f {
        FunctionKind::Sqrt => SchurSqrt::new(&h)?.apply(&e1),
        FunctionKind::InvSqrt => SchurSqrt::new(&h)?.apply_inverse(&e1),
        FunctionKind::Inverse => {
            hessenberg_solve(&h, C64::new(0.0, 0.0), &e1).map_err(|_| Error::SingularProjectedMatrix)?
        }
    };
    for v in y.iter_mut() {
        *v *= view.b_norm();
    }
    Ok(y)
}

/// `Arn_k(f) = ‖b‖ Q_k f(H_k) e_1`.
pub fn arnoldi_fun_action(view: &ArnoldiView<'_>, f: FunctionKind) -> Result<Vec<C64>> {
    let y = projected_fun_action(view, f)?;
    Ok(view.combine(&y))
}

/// The FOM iterate `x_k = ‖b‖ Q_k H_k⁻¹ e_1`.
pub fn fom_iterate(view: &ArnoldiView<'_>) -> Result<Vec<C64>> {
    arnoldi_fun_action(view, FunctionKind::Inverse)
}

/// FOM residual `r_k = b − M x_k = c · q_{k+1}` from the subdiagonal product:
/// `c = (−1)^k ∏ h_{j+1,j} ‖b‖ / det(H_k)`. Returns `(|c|, c)`.
pub fn fom_residual_norm(view: &ArnoldiView<'_>) -> Result<(f64, C64)> {
    check_k(view)?;
    let det = HessenbergRows::new(&view.hessenberg())
        .log_det_shifted(C64::new(0.0, 0.0))
        .ok_or(Error::SingularProjectedMatrix)?;
    if view.is_breakdown() {
        return Ok((0.0, C64::new(0.0, 0.0)));
    }
    let log_prod: f64 = view.subdiagonals().iter().map(|h| h.ln()).sum();
    let log_abs = log_prod + view.b_norm().ln() - det.log_abs;
    let sign = if view.k().is_multiple_of(2) { 1.0 } else { -1.0 };
    let mag = log_abs.exp();
    Ok((mag, det.phase.conj() * sign * mag))
}

/// `‖x_exact − x_k‖` given the exact solution of `M x = b`.
pub fn fom_error_norm_exact(view: &ArnoldiView<'_>, x_exact: &[C64]) -> Result<f64> {
    let x = fom_iterate(view)?;
    Ok(norm2(&sub(x_exact, &x)))
}

/// `‖M⁻¹b − x_k‖` with `M⁻¹b` from a dense LU solve.
pub fn fom_error_norm(view: &ArnoldiView<'_>, m: &DenseMatrix, b: &[C64]) -> Result<f64> {
    let lu = LuFactorization::new(m)?;
    fom_error_norm_exact(view, &lu.solve(b))
}

/// Both sides of the shift relations between the FOM quantities for `M − zI`
/// and for `M`:
/// `r_z = (det H_k / det(H_k − zI)) r_0` and
/// `ξ_z = (det H_k / det(H_k − zI)) (M − zI)⁻¹ M ξ_0`.
#[derive(Clone, Debug)]
pub struct ShiftedFom {
    pub det_ratio: C64,
    pub residual_direct: Vec<C64>,
    pub residual_formula: Vec<C64>,
    pub error_direct: Vec<C64>,
    pub error_formula: Vec<C64>,
}

pub fn shifted_fom_quantities(view: &ArnoldiView<'_>, m: &DenseMatrix, b: &[C64], z: C64) -> Result<ShiftedFom> {
    check_k(view)?;
    let n = view.n();
    let h = view.hessenberg();
    let rows = HessenbergRows::new(&h);
    let singular = |_| Error::SingularShift { shift: z };
    let det0 = rows
        .log_det_shifted(C64::new(0.0, 0.0))
        .ok_or(Error::SingularProjectedMatrix)?;
    let detz = rows.log_det_shifted(z).ok_or(Error::SingularShift { shift: z })?;
    let det_ratio = det0.ratio(&detz);

    let lu0 = LuFactorization::new(m)?;
    let luz = LuFactorization::new(&m.shifted(-z)).map_err(singular)?;
    let e1: Vec<C64> = unit(view.k(), 0).iter().map(|v| v * view.b_norm()).collect();

    let x0 = view.combine(&hessenberg_solve(&h, C64::new(0.0, 0.0), &e1).map_err(|_| Error::SingularProjectedMatrix)?);
    let xz = view.combine(&hessenberg_solve(&h, z, &e1).map_err(singular)?);

    let r0 = sub(b, &m.matvec(&x0));
    let residual_direct = sub(b, &m.shifted(-z).matvec(&xz));
    let residual_formula: Vec<C64> = r0.iter().map(|v| v * det_ratio).collect();

    let xi0 = sub(&lu0.solve(b), &x0);
    let error_direct = sub(&luz.solve(b), &xz);
    let mxi0 = m.matvec(&xi0);
    let error_formula: Vec<C64> = luz.solve(&mxi0).iter().map(|v| v * det_ratio).collect();
    debug_assert_eq!(error_formula.len(), n);
    Ok(ShiftedFom {
        det_ratio,
        residual_direct,
        residual_formula,
        error_direct,
        error_formula,
    })
}
