//! Adaptive Arnoldi iteration driven by a residual or bound stopping rule.

use super::decomposition::{ArnoldiDecomposition, ArnoldiView};
use super::fom::{arnoldi_fun_action, fom_error_norm_exact, fom_residual_norm, FunctionKind};
use crate::bounds::{
    bound_apriori_invsqrt, bound_apriori_sqrt, bound_hermitian_invsqrt, bound_hermitian_jensen, bound_hermitian_loose,
    bound_posterior_determinant, bound_posterior_modulus, bound_posterior_ritz, lambda_bar, BoundKind, BoundReport,
    QuadratureConfig,
};
use crate::error::{Error, Result};
use crate::linalg::singular::DEFAULT_SIGMA_TOL;
use crate::linalg::vector::{norm2, sub};
use crate::linalg::{hessenberg_eigenvalues, sigma_max, HessenbergRows, LinearOperator, RitzSpectrum, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StoppingRule {
    /// `‖r_k‖/‖b‖ ≤ tol` for the FOM residual.
    ResidualRelative(f64),
    /// The chosen bound is at most `tol`; only checked for `k ≥ 2`.
    BoundAbsolute { tol: f64, kind: BoundKind },
}

impl StoppingRule {
    fn validate(&self) -> Result<()> {
        let tol = match *self {
            StoppingRule::ResidualRelative(t) => t,
            StoppingRule::BoundAbsolute { tol, .. } => tol,
        };
        if tol.is_finite() && tol > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "stopping tolerance must be positive, got {tol}"
            )))
        }
    }
}

/// Where `‖ξ_k‖ = ‖M⁻¹b − x_k‖` comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum XiSource {
    /// The exact solution `M⁻¹b`; bounds built from it are certified.
    Exact(Vec<C64>),
    /// `‖r_k‖/μ²` with `μ²` a lower bound on `Re(xᴴMx)/‖x‖²`. Not certified:
    /// only valid if `mu_sq` really bounds the numerical range from below.
    ResidualOverCoercivity { mu_sq: f64 },
}

/// How the posterior Ritz bound is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PosteriorRoute {
    /// From the eigenvalues of `H_k`; `O(k³)` per check.
    #[default]
    Ritz,
    /// From `det H_k / det(H_k + xI)` by Hessenberg elimination; `O(k²)` per
    /// integrand evaluation and no eigenvalue solve.
    Determinant,
}

/// How often the stopping rule is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CheckSchedule {
    #[default]
    EveryStep,
    /// Check every `s` steps; once a check passes, bisect back over the
    /// skipped steps. This finds the first passing `k` when the monitored
    /// quantity is monotone in `k`, which the bounds are in practice but not
    /// provably.
    Stride(usize),
}

/// Spectral data enabling the Hermitian bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianInfo {
    pub lambda_max: f64,
    /// Eigenvalues in descending order, when known. Without them `λ̄` is
    /// formed from the Ritz values.
    pub top_eigs: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct AdaptiveOptions {
    pub f: FunctionKind,
    pub stop: StoppingRule,
    pub k_max: usize,
    pub xi: XiSource,
    pub schedule: CheckSchedule,
    pub route: PosteriorRoute,
    pub quadrature: QuadratureConfig,
    /// `σ_max(M)` for the a priori bounds; estimated by Lanczos if absent.
    pub sigma_max: Option<f64>,
    pub hermitian: Option<HermitianInfo>,
    /// `f(M)b`, for the true error column.
    pub reference: Option<Vec<C64>>,
    /// Evaluate every bound at every check rather than only the one the rule
    /// needs. The report at the stopping `k` is always complete.
    pub full_history: bool,
    pub reorthogonalize: bool,
}

impl AdaptiveOptions {
    pub fn new(f: FunctionKind, stop: StoppingRule, k_max: usize, xi: XiSource) -> Self {
        Self {
            f,
            stop,
            k_max,
            xi,
            schedule: CheckSchedule::EveryStep,
            route: PosteriorRoute::Ritz,
            quadrature: QuadratureConfig::default(),
            sigma_max: None,
            hermitian: None,
            reference: None,
            full_history: true,
            reorthogonalize: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopStatus {
    RuleSatisfied,
    /// The Krylov space became invariant; the result is exact.
    Breakdown,
    /// `k_max` steps without meeting the rule; the result is the last iterate.
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct AdaptiveOutcome {
    pub result: Vec<C64>,
    pub k: usize,
    pub status: StopStatus,
    /// One report per evaluated `k`, in increasing `k`.
    pub history: Vec<BoundReport>,
    pub decomposition: ArnoldiDecomposition,
}

impl AdaptiveOutcome {
    pub fn final_report(&self) -> &BoundReport {
        self.history.last().expect("history is never empty")
    }

    /// `Err(BudgetExhausted)` when the rule was not met within `k_max`.
    pub fn require_converged(&self) -> Result<()> {
        if self.status == StopStatus::BudgetExhausted {
            Err(Error::BudgetExhausted { k_max: self.k })
        } else {
            Ok(())
        }
    }
}

struct Evaluator<'a, A: LinearOperator + ?Sized> {
    op: &'a A,
    opts: &'a AdaptiveOptions,
    sigma: Option<f64>,
}

impl<A: LinearOperator + ?Sized> Evaluator<'_, A> {
    fn sigma(&mut self) -> Result<f64> {
        if let Some(s) = self.sigma {
            return Ok(s);
        }
        let s = sigma_max(self.op, DEFAULT_SIGMA_TOL)?;
        self.sigma = Some(s);
        Ok(s)
    }

    fn xi_norm(&self, view: &ArnoldiView<'_>, residual: f64) -> Result<f64> {
        match &self.opts.xi {
            XiSource::Exact(x) => fom_error_norm_exact(view, x),
            XiSource::ResidualOverCoercivity { mu_sq } => Ok(residual / mu_sq),
        }
    }

    fn report(&mut self, view: &ArnoldiView<'_>, full: bool, action: Option<&[C64]>) -> Result<BoundReport> {
        let k = view.k();
        let (residual_norm, _) = fom_residual_norm(view)?;
        let xi_norm = self.xi_norm(view, residual_norm)?;
        let mut rep = BoundReport {
            k,
            residual_norm,
            xi_norm,
            error_norm: None,
            posterior_ritz: None,
            posterior_modulus: None,
            apriori_gamma: None,
            hermitian_loose: None,
            hermitian_jensen: None,
            lambda_bar: None,
            sigma_max_used: None,
        };
        let needed = match self.opts.stop {
            StoppingRule::BoundAbsolute { kind, .. } => Some(kind),
            StoppingRule::ResidualRelative(_) => None,
        };
        let want = |kind: BoundKind| full || needed == Some(kind);
        let cfg = &self.opts.quadrature;

        let h = view.hessenberg();
        let mut ritz: Option<RitzSpectrum> = None;
        let need_ritz = self.opts.f == FunctionKind::Sqrt
            && k >= 2
            && (want(BoundKind::PosteriorModulus)
                || (want(BoundKind::PosteriorRitz) && self.opts.route == PosteriorRoute::Ritz))
            || (self.opts.hermitian.as_ref().is_some_and(|hi| hi.top_eigs.is_none())
                && (want(BoundKind::HermitianJensen) || self.opts.f == FunctionKind::InvSqrt));
        if need_ritz {
            ritz = Some(hessenberg_eigenvalues(&h)?);
        }

        match self.opts.f {
            FunctionKind::Sqrt => {
                if want(BoundKind::PosteriorRitz) {
                    rep.posterior_ritz = Some(if k < 2 {
                        f64::INFINITY
                    } else {
                        match self.opts.route {
                            PosteriorRoute::Ritz => {
                                bound_posterior_ritz(ritz.as_ref().expect("computed"), xi_norm, cfg)?
                            }
                            PosteriorRoute::Determinant => {
                                bound_posterior_determinant(&HessenbergRows::new(&h), xi_norm, cfg)?
                            }
                        }
                    });
                }
                if want(BoundKind::PosteriorModulus) {
                    rep.posterior_modulus = Some(if k < 2 {
                        f64::INFINITY
                    } else {
                        bound_posterior_modulus(ritz.as_ref().expect("computed"), xi_norm, cfg)?
                    });
                }
                if want(BoundKind::AprioriGamma) {
                    let s = self.sigma()?;
                    rep.sigma_max_used = Some(s);
                    rep.apriori_gamma = Some(if k < 2 {
                        f64::INFINITY
                    } else {
                        bound_apriori_sqrt(s, k, xi_norm)?
                    });
                }
                if let Some(hi) = &self.opts.hermitian {
                    if want(BoundKind::HermitianLoose) {
                        rep.hermitian_loose = Some(bound_hermitian_loose(hi.lambda_max, k, xi_norm)?);
                    }
                    if want(BoundKind::HermitianJensen) {
                        let lb = self.lambda_bar(hi, k, ritz.as_ref())?;
                        rep.lambda_bar = Some(lb);
                        rep.hermitian_jensen = Some(bound_hermitian_jensen(lb, k, xi_norm)?);
                    }
                }
            }
            FunctionKind::InvSqrt => {
                if want(BoundKind::AprioriGamma) {
                    let s = self.sigma()?;
                    rep.sigma_max_used = Some(s);
                    rep.apriori_gamma = Some(bound_apriori_invsqrt(s, k, xi_norm)?);
                }
                if let Some(hi) = &self.opts.hermitian {
                    if want(BoundKind::HermitianJensen) {
                        let lb = self.lambda_bar(hi, k, ritz.as_ref())?;
                        rep.lambda_bar = Some(lb);
                        rep.hermitian_jensen = Some(bound_hermitian_invsqrt(lb, k, xi_norm)?);
                    }
                }
            }
            FunctionKind::Inverse => {}
        }

        if let Some(reference) = &self.opts.reference {
            let owned;
            let approx = match action {
                Some(a) => a,
                None if full => {
                    owned = arnoldi_fun_action(view, self.opts.f)?;
                    &owned
                }
                None => return Ok(rep),
            };
            rep.error_norm = Some(norm2(&sub(approx, reference)));
        }
        Ok(rep)
    }

    fn lambda_bar(&self, hi: &HermitianInfo, k: usize, ritz: Option<&RitzSpectrum>) -> Result<f64> {
        match &hi.top_eigs {
            Some(eigs) if eigs.len() >= k => lambda_bar(&eigs[..k], hi.lambda_max, k),
            Some(eigs) => Err(Error::InvalidInput(format!(
                "{} known eigenvalues are not enough for k = {k}",
                eigs.len()
            ))),
            None => {
                let mut vals: Vec<f64> = ritz.expect("computed").values().iter().map(|z| z.re).collect();
                vals.sort_by(|a, b| b.total_cmp(a));
                // the Lanczos estimate can sit a hair below the top Ritz value
                let lmax = hi.lambda_max.max(vals[0]);
                lambda_bar(&vals, lmax, k)
            }
        }
    }
}

fn satisfied(stop: StoppingRule, rep: &BoundReport, b_norm: f64) -> bool {
    match stop {
        StoppingRule::ResidualRelative(tol) => rep.residual_norm <= tol * b_norm,
        StoppingRule::BoundAbsolute { tol, kind } => rep.k >= 2 && rep.bound(kind).is_some_and(|v| v <= tol),
    }
}

/// Runs Arnoldi on `op` from `b` until the stopping rule holds, the Krylov
/// space becomes invariant, or `k_max` steps have been taken.
///
/// `BudgetExhausted` is reported through [`AdaptiveOutcome::status`], with the
/// last iterate as the result.
pub fn run_adaptive<A: LinearOperator + ?Sized>(op: &A, b: &[C64], opts: &AdaptiveOptions) -> Result<AdaptiveOutcome> {
    if opts.k_max < 2 {
        return Err(Error::InvalidInput(format!(
            "k_max must be at least 2, got {}",
            opts.k_max
        )));
    }
    opts.stop.validate()?;
    opts.quadrature.validate()?;
    if op.dim() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: b.len(),
        });
    }
    for v in [
        opts.reference.as_deref(),
        match &opts.xi {
            XiSource::Exact(x) => Some(x.as_slice()),
            XiSource::ResidualOverCoercivity { .. } => None,
        },
    ]
    .into_iter()
    .flatten()
    {
        if v.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: b.len(),
                got: v.len(),
            });
        }
    }
    if let XiSource::ResidualOverCoercivity { mu_sq } = opts.xi {
        if !(mu_sq.is_finite() && mu_sq > 0.0) {
            return Err(Error::InvalidInput(format!("mu_sq must be positive, got {mu_sq}")));
        }
    }
    let stride = match opts.schedule {
        CheckSchedule::EveryStep => 1,
        CheckSchedule::Stride(0) => return Err(Error::InvalidInput("check stride must be positive".into())),
        CheckSchedule::Stride(s) => s,
    };

    let mut decomp = ArnoldiDecomposition::new(b)?.with_reorthogonalization(opts.reorthogonalize);
    let mut eval = Evaluator {
        op,
        opts,
        sigma: opts.sigma_max,
    };
    let mut history: Vec<BoundReport> = Vec::new();
    let b_norm = decomp.b_norm();
    let mut last_fail = 0usize;

    let (k_stop, status) = loop {
        let target = (decomp.k() + stride).min(opts.k_max);
        decomp.extend(op, target - decomp.k())?;
        let k = decomp.k();
        let view = decomp.prefix(k);
        if view.is_breakdown() {
            break (k, StopStatus::Breakdown);
        }
        let rep = eval.report(&view, opts.full_history, None)?;
        let ok = satisfied(opts.stop, &rep, b_norm);
        history.push(rep);
        if ok {
            // bisect over the unchecked steps since the last failing check
            let (mut lo, mut hi) = (last_fail, k);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                let rep = eval.report(&decomp.prefix(mid), opts.full_history, None)?;
                let ok = satisfied(opts.stop, &rep, b_norm);
                history.push(rep);
                if ok {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            break (hi, StopStatus::RuleSatisfied);
        }
        last_fail = k;
        if k >= opts.k_max {
            break (k, StopStatus::BudgetExhausted);
        }
    };

    let view = decomp.prefix(k_stop);
    let result = arnoldi_fun_action(&view, opts.f)?;
    let final_rep = eval.report(&view, true, Some(&result))?;
    history.retain(|r| r.k != k_stop);
    history.push(final_rep);
    history.sort_by_key(|r| r.k);
    // reports for steps past the stopping point came from the stride overshoot
    history.retain(|r| r.k <= k_stop);
    Ok(AdaptiveOutcome {
        result,
        k: k_stop,
        status,
        history,
        decomposition: decomp,
    })
}

/// Full reports at each requested `k` (ascending, deduplicated), ignoring the
/// stopping rule. Stops early at breakdown; the last report is then at the
/// breakdown step.
pub fn sweep_reports<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[C64],
    opts: &AdaptiveOptions,
    ks: &[usize],
) -> Result<(ArnoldiDecomposition, Vec<BoundReport>)> {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.first() == Some(&0) {
        return Err(Error::InvalidInput("k values must be at least 1".into()));
    }
    let Some(&k_top) = ks.last() else {
        return Err(Error::InvalidInput("no k values requested".into()));
    };
    opts.quadrature.validate()?;
    let mut decomp = ArnoldiDecomposition::new(b)?.with_reorthogonalization(opts.reorthogonalize);
    decomp.extend(op, k_top)?;
    let mut eval = Evaluator {
        op,
        opts,
        sigma: opts.sigma_max,
    };
    let mut reports = Vec::with_capacity(ks.len());
    for &k in &ks {
        let k = k.min(decomp.k());
        if reports.last().is_some_and(|r: &BoundReport| r.k == k) {
            break;
        }
        let view = decomp.prefix(k);
        let action = if opts.reference.is_some() {
            Some(arnoldi_fun_action(&view, opts.f)?)
        } else {
            None
        };
        reports.push(eval.report(&view, true, action.as_deref())?);
    }
    Ok((decomp, reports))
}
