use super::dense::{DenseMatrix, C64};

/// A square linear map that can be applied (and adjoint-applied) to vectors.
///
/// Implementations must be reentrant: the Arnoldi driver only holds a shared
/// reference.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply(&self, x: &[C64], y: &mut [C64]);

    /// `y = A^H x`.
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]);

    /// Whether all entries are real; enables real-arithmetic fast paths.
    fn is_real(&self) -> bool {
        false
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        assert!(self.is_square());
        self.rows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_into(x, y);
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        self.adjoint_matvec_into(x, y);
    }

    fn is_real(&self) -> bool {
        DenseMatrix::is_real(self)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply(x, y)
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply_adjoint(x, y)
    }

    fn is_real(&self) -> bool {
        (**self).is_real()
    }
}

/// Solves `A x = b` and `A^H x = b` for a fixed factored matrix.
pub trait LinearSolver {
    fn dim(&self) -> usize;
    fn solve(&self, b: &[C64]) -> Vec<C64>;
    fn solve_adjoint(&self, b: &[C64]) -> Vec<C64>;
}
