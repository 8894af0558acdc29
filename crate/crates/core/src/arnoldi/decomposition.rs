use crate::error::{Error, Result};
use crate::linalg::vector::{all_finite, dot, norm2};
use crate::linalg::{DenseMatrix, LinearOperator, C64};

/// Relative size below which `h_{j+1,j}` counts as an exact breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// `M Q_k = Q_k H_k + h_{k+1,k} q_{k+1} e_kᵀ` with `q_1 = b/‖b‖`.
///
/// The decomposition of a larger `k` contains every smaller one; use
/// [`ArnoldiDecomposition::prefix`] to look at the first `k` steps.
#[derive(Clone, Debug)]
pub struct ArnoldiDecomposition {
    n: usize,
    basis: Vec<Vec<C64>>,
    // column j holds h_{0..=j+1, j}
    h: Vec<Vec<C64>>,
    b_norm: f64,
    breakdown: bool,
    reorthogonalize: bool,
}

impl ArnoldiDecomposition {
    /// The zero-step decomposition for starting vector `b`.
    pub fn new(b: &[C64]) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidInput("starting vector is empty".into()));
        }
        if !all_finite(b) {
            return Err(Error::NonFiniteEntry {
                context: "starting vector",
            });
        }
        let b_norm = norm2(b);
        if b_norm == 0.0 {
            return Err(Error::InvalidInput("starting vector is zero".into()));
        }
        let q1 = b.iter().map(|v| v / b_norm).collect();
        Ok(Self {
            n: b.len(),
            basis: vec![q1],
            h: Vec::new(),
            b_norm,
            breakdown: false,
            reorthogonalize: false,
        })
    }

    /// Enables a second Gram–Schmidt pass in subsequent steps.
    pub fn with_reorthogonalization(mut self, on: bool) -> Self {
        self.reorthogonalize = on;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.h.len()
    }

    pub fn b_norm(&self) -> f64 {
        self.b_norm
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    /// `q_{j+1}` (zero-based `j`).
    pub fn q(&self, j: usize) -> &[C64] {
        &self.basis[j]
    }

    pub fn h_entry(&self, i: usize, j: usize) -> C64 {
        self.h[j].get(i).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn view(&self) -> ArnoldiView<'_> {
        self.prefix(self.k())
    }

    /// The decomposition after the first `k` steps.
    pub fn prefix(&self, k: usize) -> ArnoldiView<'_> {
        assert!(k <= self.k(), "prefix {k} exceeds {} completed steps", self.k());
        ArnoldiView { d: self, k }
    }

    /// Runs up to `steps` further Arnoldi steps with modified Gram–Schmidt.
    /// Stops early on breakdown or once `k = n`.
    pub fn extend<A: LinearOperator + ?Sized>(&mut self, op: &A, steps: usize) -> Result<()> {
        if op.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: op.dim(),
            });
        }
        let mut w = vec![C64::new(0.0, 0.0); self.n];
        for _ in 0..steps {
            if self.breakdown {
                break;
            }
            let j = self.k();
            op.apply(&self.basis[j], &mut w);
            if !all_finite(&w) {
                return Err(Error::NonFiniteEntry {
                    context: "operator output",
                });
            }
            let mq_norm = norm2(&w);
            let mut col = vec![C64::new(0.0, 0.0); j + 2];
            for (i, q) in self.basis.iter().enumerate() {
                let hij = dot(q, &w);
                col[i] = hij;
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= hij * qi;
                }
            }
            if self.reorthogonalize {
                for (i, q) in self.basis.iter().enumerate() {
                    let c = dot(q, &w);
                    col[i] += c;
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let hnext = norm2(&w);
            // at k = n the Krylov space is the whole space, so whatever is left
            // of w is rounding noise
            if hnext <= BREAKDOWN_TOL * mq_norm || j + 1 == self.n {
                col.truncate(j + 1);
                self.h.push(col);
                self.breakdown = true;
                break;
            }
            col[j + 1] = C64::new(hnext, 0.0);
            self.h.push(col);
            let inv = 1.0 / hnext;
            self.basis.push(w.iter().map(|v| v * inv).collect());
        }
        Ok(())
    }
}

/// Runs `steps` Arnoldi steps on `state`, consuming and returning it.
pub fn arnoldi_extend<A: LinearOperator + ?Sized>(
    op: &A,
    mut state: ArnoldiDecomposition,
    steps: usize,
) -> Result<ArnoldiDecomposition> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    state.extend(op, steps)?;
    Ok(state)
}

/// A borrowed view of the first `k` Arnoldi steps.
#[derive(Clone, Copy, Debug)]
pub struct ArnoldiView<'a> {
    d: &'a ArnoldiDecomposition,
    k: usize,
}

impl<'a> ArnoldiView<'a> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.d.n
    }

    pub fn b_norm(&self) -> f64 {
        self.d.b_norm
    }

    /// True when step `k` ended in breakdown, so the Krylov space is invariant.
    pub fn is_breakdown(&self) -> bool {
        self.d.breakdown && self.k == self.d.k()
    }

    /// `h_{k+1,k}`; zero at breakdown.
    pub fn subdiag(&self) -> f64 {
        if self.k == 0 || self.is_breakdown() {
            0.0
        } else {
            self.d.h[self.k - 1][self.k].re
        }
    }

    /// Subdiagonal entries `h_{2,1}, …, h_{k+1,k}`.
    pub fn subdiagonals(&self) -> Vec<f64> {
        (0..self.k)
            .map(|j| {
                if j + 1 == self.k {
                    self.subdiag()
                } else {
                    self.d.h[j][j + 1].re
                }
            })
            .collect()
    }

    pub fn q(&self, j: usize) -> &'a [C64] {
        assert!(j <= self.k);
        &self.d.basis[j]
    }

    /// `q_{k+1}`, absent at breakdown.
    pub fn next_q(&self) -> Option<&'a [C64]> {
        if self.is_breakdown() {
            None
        } else {
            self.d.basis.get(self.k).map(|v| v.as_slice())
        }
    }

    /// The `k × k` upper Hessenberg matrix `H_k`.
    pub fn hessenberg(&self) -> DenseMatrix {
        let k = self.k;
        DenseMatrix::from_fn(k, k, |i, j| {
            if i <= j + 1 {
                self.d.h_entry(i, j)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `Q_k` as an `n × k` matrix.
    pub fn basis(&self) -> DenseMatrix {
        let n = self.d.n;
        let mut data = Vec::with_capacity(n * self.k);
        for q in &self.d.basis[..self.k] {
            data.extend_from_slice(q);
        }
        DenseMatrix::from_col_major(
            n,
            self.k.max(1),
            if self.k == 0 { vec![C64::new(0.0, 0.0); n] } else { data },
        )
        .expect("basis vectors are finite")
    }

    /// `Q_k y`.
    pub fn combine(&self, y: &[C64]) -> Vec<C64> {
        assert_eq!(y.len(), self.k);
        let mut x = vec![C64::new(0.0, 0.0); self.d.n];
        for (q, &c) in self.d.basis.iter().zip(y) {
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi += c * qi;
            }
        }
        x
    }
}
