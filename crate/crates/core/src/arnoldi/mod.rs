//! The Arnoldi process, Krylov function actions, FOM quantities and the
//! adaptive driver.

pub mod adaptive;
pub mod decomposition;
pub mod fom;

pub use adaptive::{
    run_adaptive, sweep_reports, AdaptiveOptions, AdaptiveOutcome, CheckSchedule, HermitianInfo, PosteriorRoute,
    StopStatus, StoppingRule, XiSource,
};
pub use decomposition::{arnoldi_extend, ArnoldiDecomposition, ArnoldiView, BREAKDOWN_TOL};
pub use fom::{
    arnoldi_fun_action, fom_error_norm, fom_error_norm_exact, fom_iterate, fom_residual_norm, projected_fun_action,
    shifted_fom_quantities, FunctionKind, ShiftedFom,
};
