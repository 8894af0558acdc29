//! Dense linear-algebra kernels on complex matrices.

pub mod dense;
pub mod eigen;
pub mod hermitian;
pub mod hessenberg;
pub mod lu;
pub mod operator;
pub mod qr;
pub mod schur;
pub mod singular;
pub mod sqrtm;
pub mod vector;

pub use dense::{DenseMatrix, C64};
pub use eigen::{eigenvalues, hessenberg_eigenvalues, RitzSpectrum};
pub use hermitian::{hermitian_eigenvalues, min_symmetric_eig, tridiagonal_eigen, tridiagonal_min_eig};
pub use hessenberg::hessenberg_reduce;
pub use lu::{lu_solve, HessenbergRows, LogDet, LuFactorization};
pub use operator::{LinearOperator, LinearSolver};
pub use qr::qr_householder;
pub use schur::{schur, SchurDecomposition};
pub use singular::{condition_number_2, sigma_max, sigma_max_with, sigma_min, SigmaOptions};
pub use sqrtm::{dense_sqrt, reference_invsqrt_action, reference_sqrt_action, SchurSqrt};
