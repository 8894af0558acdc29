//! The experiment drivers. Each returns one [`Table`]; nothing here writes
//! files.

use krylov_sqrt::arnoldi::{
    arnoldi_fun_action, fom_error_norm_exact, run_adaptive, sweep_reports, AdaptiveOptions, ArnoldiDecomposition,
    CheckSchedule, FunctionKind, HermitianInfo, PosteriorRoute, StopStatus, StoppingRule, XiSource,
};
use krylov_sqrt::bounds::{bound_perturbed, scaling_term, BoundKind, BoundReport};
use krylov_sqrt::linalg::singular::DEFAULT_SIGMA_TOL;
use krylov_sqrt::linalg::vector::{norm2, sub};
use krylov_sqrt::linalg::{sigma_min, LinearSolver, LuFactorization};
use krylov_sqrt::matgen::{perturb_matrix, GridConvention, PerturbationSpec};

use crate::config::{BoundName, Config, ExperimentKind, MatrixConfig, StoppingConfig, SweepConfig};
use crate::error::{invalid, CliResult};
use crate::fit::{fit_slopes, lin_spaced, ls_slope, pooled_slope};
use crate::problem::{Operator, Problem};
use crate::table::{Cell, Column, ColumnType, PlotLayout, PlotScale, Table};

/// Default sweep values.
pub const DEFAULT_SCALING_POINTS: usize = 40;
pub const DEFAULT_K_FRACTION: f64 = 0.9;
pub const DEFAULT_SIGMA_K: usize = 150;
pub const DEFAULT_EPS: [f64; 3] = [1e-4, 1e-3, 1e-2];
pub const DEFAULT_INSTANCES: usize = 10;
/// Stopping rule of the convection–diffusion table.
pub const TABLE_STOP: StoppingConfig = StoppingConfig::BoundAbsolute {
    tol: 0.05,
    bound: BoundName::PosteriorRitz,
};

pub fn run_experiment(cfg: &Config) -> CliResult<Table> {
    let kind = cfg
        .experiment
        .ok_or_else(|| invalid("config has no \"experiment\" field"))?;
    check_sweep_fields(kind, &cfg.sweep)?;
    let mut table = match kind {
        ExperimentKind::BoundsVsK => bounds_vs_k(cfg)?,
        ExperimentKind::HermitianCompare => hermitian_compare(cfg)?,
        ExperimentKind::ConvdiffTable => convdiff_table(cfg)?,
        ExperimentKind::ScalingVsK => scaling_vs_k(cfg)?,
        ExperimentKind::ScalingVsSigma => scaling_vs_sigma(cfg)?,
        ExperimentKind::PerturbedValidity => perturbed_validity(cfg)?,
    };
    table.meta.insert(0, ("seed".into(), cfg.seed.to_string()));
    Ok(table)
}

fn check_sweep_fields(kind: ExperimentKind, s: &SweepConfig) -> CliResult<()> {
    let used: &[&str] = match kind {
        ExperimentKind::BoundsVsK | ExperimentKind::HermitianCompare => &[],
        ExperimentKind::ConvdiffTable => &["sizes"],
        ExperimentKind::ScalingVsK => &["sizes", "points", "k_fraction"],
        ExperimentKind::ScalingVsSigma => &["sizes", "k_values"],
        ExperimentKind::PerturbedValidity => &["eps", "instances", "perturbation"],
    };
    let set = [
        ("sizes", s.sizes.is_some()),
        ("k_values", s.k_values.is_some()),
        ("points", s.points.is_some()),
        ("k_fraction", s.k_fraction.is_some()),
        ("eps", s.eps.is_some()),
        ("instances", s.instances.is_some()),
        ("perturbation", s.perturbation.is_some()),
    ];
    for (name, present) in set {
        if present && !used.contains(&name) {
            return Err(invalid(format!("sweep.{name} is not used by {}", kind.name())));
        }
    }
    Ok(())
}

/// Options shared by every Arnoldi run: certified `ξ`, σ_max, Hermitian data
/// and (with the oracle) the reference action.
pub(crate) fn run_options(
    cfg: &Config,
    p: &Problem,
    f: FunctionKind,
    stop: StoppingRule,
) -> CliResult<AdaptiveOptions> {
    let mut o = AdaptiveOptions::new(f, stop, cfg.k_max.min(p.n()), XiSource::Exact(p.solve(&p.b)?));
    o.quadrature = cfg.quadrature.into();
    o.sigma_max = Some(p.sigma_max()?);
    o.hermitian = p.hermitian_info();
    o.full_history = cfg.full_history;
    o.reorthogonalize = cfg.reorthogonalize;
    if cfg.check_stride > 1 {
        o.schedule = CheckSchedule::Stride(cfg.check_stride);
    }
    if cfg.oracle {
        o.reference = Some(p.reference(f)?);
    }
    Ok(o)
}

pub(crate) fn status_name(s: StopStatus) -> &'static str {
    match s {
        StopStatus::RuleSatisfied => "rule_satisfied",
        StopStatus::Breakdown => "breakdown",
        StopStatus::BudgetExhausted => "budget_exhausted",
    }
}

type Field = (&'static str, &'static str, fn(&BoundReport) -> Option<f64>);

const REPORT_FIELDS: [Field; 9] = [
    ("residual_norm", "FOM residual norm of Mx = b", |r| {
        Some(r.residual_norm)
    }),
    ("xi_norm", "FOM error norm of Mx = b", |r| Some(r.xi_norm)),
    ("error_norm", "true error of the Arnoldi approximation", |r| {
        r.error_norm
    }),
    ("posterior_ritz", "a posteriori bound over the Ritz values", |r| {
        r.posterior_ritz
    }),
    ("posterior_modulus", "a posteriori bound over the Ritz moduli", |r| {
        r.posterior_modulus
    }),
    ("apriori_gamma", "a priori bound in sigma_max", |r| r.apriori_gamma),
    ("hermitian_loose", "Hermitian bound in lambda_max", |r| {
        r.hermitian_loose
    }),
    ("hermitian_jensen", "Hermitian bound in lambda_bar", |r| {
        r.hermitian_jensen
    }),
    ("lambda_bar", "mean of the k largest eigenvalues and lambda_max", |r| {
        r.lambda_bar
    }),
];

const BOUND_COLUMNS: [&str; 5] = [
    "posterior_ritz",
    "posterior_modulus",
    "apriori_gamma",
    "hermitian_loose",
    "hermitian_jensen",
];

/// One row per report; a field becomes a column when any report has it, and
/// reports without it leave the cell empty.
pub(crate) fn report_table(name: &str, reports: &[BoundReport]) -> CliResult<Table> {
    let fields: Vec<&Field> = REPORT_FIELDS
        .iter()
        .filter(|(_, _, get)| reports.iter().any(|r| get(r).is_some()))
        .collect();
    let mut cols = vec![Column::new("k", ColumnType::Integer, "Krylov subspace dimension")];
    cols.extend(fields.iter().map(|(n, d, _)| Column::new(n, ColumnType::Float, d)));
    let mut t = Table::new(name, cols);
    for r in reports {
        let mut row = vec![Cell::Int(r.k as i64)];
        for (_, _, get) in &fields {
            row.push(get(r).map_or(Cell::Empty, Cell::Float));
        }
        t.push(row);
    }
    Ok(t)
}

pub(crate) fn semilog_layout(t: &Table) -> PlotLayout {
    let y = std::iter::once("error_norm")
        .chain(BOUND_COLUMNS)
        .filter(|c| t.column_index(c).is_some())
        .map(str::to_string)
        .collect();
    PlotLayout {
        x: "k".into(),
        y,
        group: None,
        scale: PlotScale::SemilogY,
        markers: false,
    }
}

fn bounds_vs_k(cfg: &Config) -> CliResult<Table> {
    let p = Problem::build(cfg.matrix()?, cfg.rhs, cfg.seed)?;
    p.check_oracle_size(cfg.oracle)?;
    let f: FunctionKind = cfg.function.into();
    let (reports, status, sigma) = match cfg.stopping {
        Some(stop) => {
            let opts = run_options(cfg, &p, f, stop.rule())?;
            let out = run_adaptive(&p.op, &p.b, &opts)?;
            (out.history, status_name(out.status), opts.sigma_max)
        }
        None => {
            let mut opts = run_options(cfg, &p, f, StoppingConfig::DEFAULT.rule())?;
            opts.full_history = true;
            let ks: Vec<usize> = (1..=opts.k_max).collect();
            let (d, reps) = sweep_reports(&p.op, &p.b, &opts, &ks)?;
            let status = if d.breakdown() { "breakdown" } else { "fixed_range" };
            (reps, status, opts.sigma_max)
        }
    };
    let mut t = report_table("bounds_vs_k", &reports)?;
    t.meta.push(("n".into(), p.n().to_string()));
    t.meta.push(("function".into(), f.name().into()));
    t.meta.push(("status".into(), status.into()));
    if let Some(s) = sigma {
        t.meta.push(("sigma_max".into(), crate::table::format_float(s)));
    }
    t.plot = Some(semilog_layout(&t));
    Ok(t)
}

fn hermitian_compare(cfg: &Config) -> CliResult<Table> {
    let p = Problem::build(cfg.matrix()?, cfg.rhs, cfg.seed)?;
    if !p.hermitian_known {
        return Err(invalid("hermitian_compare needs a spectrum matrix with skew_scale 0"));
    }
    p.check_oracle_size(cfg.oracle)?;
    let f: FunctionKind = cfg.function.into();
    let mut opts = run_options(cfg, &p, f, StoppingConfig::DEFAULT.rule())?;
    opts.full_history = true;
    let ks: Vec<usize> = (1..=opts.k_max).collect();
    let (_, known) = sweep_reports(&p.op, &p.b, &opts, &ks)?;
    // λ̄ from the Ritz values alone, as it would be computed in practice
    let lambda_max = p.sigma_max()?;
    opts.hermitian = Some(HermitianInfo {
        lambda_max,
        top_eigs: None,
    });
    opts.reference = None;
    let (_, ritz) = sweep_reports(&p.op, &p.b, &opts, &ks)?;

    let mut t = report_table("hermitian_compare", &known)?;
    for (name, desc) in [
        ("jensen_ratio", "hermitian_jensen / hermitian_loose"),
        ("lambda_bar_ritz", "lambda_bar formed from the Ritz values"),
        (
            "hermitian_jensen_ritz",
            "Hermitian bound with the Ritz-value lambda_bar",
        ),
    ] {
        t.columns.push(Column::new(name, ColumnType::Float, desc));
    }
    let mut violations = 0;
    let mut decreasing = true;
    let mut max_late_ratio: f64 = 0.0;
    for (i, (row, (a, b))) in t.rows.iter_mut().zip(known.iter().zip(&ritz)).enumerate() {
        let (loose, jensen) = (
            a.hermitian_loose.unwrap_or(f64::NAN),
            a.hermitian_jensen.unwrap_or(f64::NAN),
        );
        let ratio = if loose > 0.0 { jensen / loose } else { 1.0 };
        if jensen > loose {
            violations += 1;
        }
        if i > 0 && a.lambda_bar.partial_cmp(&known[i - 1].lambda_bar) != Some(std::cmp::Ordering::Less) {
            decreasing = false;
        }
        if a.k >= 50 {
            max_late_ratio = max_late_ratio.max(ratio);
        }
        row.push(Cell::Float(ratio));
        row.push(b.lambda_bar.map_or(Cell::Empty, Cell::Float));
        row.push(b.hermitian_jensen.map_or(Cell::Empty, Cell::Float));
    }
    t.meta.push(("n".into(), p.n().to_string()));
    t.meta
        .push(("lambda_max".into(), crate::table::format_float(lambda_max)));
    t.summary.push(("jensen_above_loose".into(), violations as f64));
    t.summary.push((
        "lambda_bar_strictly_decreasing".into(),
        if decreasing { 1.0 } else { 0.0 },
    ));
    if known.iter().any(|r| r.k >= 50) {
        t.summary.push(("max_ratio_k_ge_50".into(), max_late_ratio));
    }
    t.plot = Some(PlotLayout {
        x: "k".into(),
        y: ["error_norm", "posterior_ritz", "hermitian_loose", "hermitian_jensen"]
            .iter()
            .filter(|c| t.column_index(c).is_some())
            .map(|s| s.to_string())
            .collect(),
        group: None,
        scale: PlotScale::SemilogY,
        markers: false,
    });
    Ok(t)
}

struct ConvdiffSweep {
    eta: f64,
    grid: GridConvention,
    sizes: Vec<usize>,
}

fn convdiff_sweep(cfg: &Config) -> CliResult<ConvdiffSweep> {
    match cfg.matrix()? {
        MatrixConfig::ConvectionDiffusion { n, eta, grid } => {
            let sizes = cfg.sweep.sizes.clone().unwrap_or_else(|| vec![*n]);
            if sizes.is_empty() || sizes.iter().any(|&s| s < 3) {
                return Err(invalid("sweep.sizes must be nonempty with every size >= 3"));
            }
            Ok(ConvdiffSweep {
                eta: *eta,
                grid: (*grid).into(),
                sizes,
            })
        }
        _ => Err(invalid(format!(
            "{} needs a convection_diffusion matrix",
            cfg.experiment.map(|e| e.name()).unwrap_or("experiment")
        ))),
    }
}

fn convdiff_problem(cfg: &Config, sw: &ConvdiffSweep, n: usize) -> CliResult<Problem> {
    let m = MatrixConfig::ConvectionDiffusion {
        n,
        eta: sw.eta,
        grid: match sw.grid {
            GridConvention::Full => crate::config::GridName::Full,
            GridConvention::Interior => crate::config::GridName::Interior,
        },
    };
    let p = Problem::build(&m, cfg.rhs, cfg.seed)?;
    p.check_oracle_size(cfg.oracle)?;
    Ok(p)
}

fn convdiff_table(cfg: &Config) -> CliResult<Table> {
    let sw = convdiff_sweep(cfg)?;
    let stop = cfg.stopping.unwrap_or(TABLE_STOP);
    let mut cols = vec![
        Column::new("n", ColumnType::Integer, "grid size, h = 1/n"),
        Column::new("unknowns", ColumnType::Integer, "matrix dimension"),
        Column::new("sigma_max", ColumnType::Float, "largest singular value"),
        Column::new("sigma_min", ColumnType::Float, "smallest singular value"),
        Column::new("cond", ColumnType::Float, "2-norm condition number"),
        Column::new("k", ColumnType::Integer, "iterations at stop"),
        Column::new("status", ColumnType::Text, "stop reason"),
    ];
    if cfg.oracle {
        cols.push(Column::new("error_norm", ColumnType::Float, "true error at stop"));
    }
    cols.push(Column::new(
        "posterior_ritz",
        ColumnType::Float,
        "a posteriori bound at stop",
    ));
    cols.push(Column::new("xi_norm", ColumnType::Float, "FOM error norm at stop"));
    let mut t = Table::new("convdiff_table", cols);
    for &n in &sw.sizes {
        let p = convdiff_problem(cfg, &sw, n)?;
        let Operator::Tridiagonal(tri) = &p.op else {
            unreachable!()
        };
        let mut opts = run_options(cfg, &p, FunctionKind::Sqrt, stop.rule())?;
        opts.route = PosteriorRoute::Determinant;
        let smax = opts.sigma_max.expect("set");
        let smin = sigma_min(&tri.lu()?, DEFAULT_SIGMA_TOL)?;
        let out = run_adaptive(&p.op, &p.b, &opts)?;
        let r = out.final_report();
        let mut row = vec![
            Cell::Int(n as i64),
            Cell::Int(p.n() as i64),
            Cell::Float(smax),
            Cell::Float(smin),
            Cell::Float(smax / smin),
            Cell::Int(out.k as i64),
            Cell::Text(status_name(out.status).into()),
        ];
        if cfg.oracle {
            row.push(Cell::Float(r.error_norm.expect("oracle")));
        }
        row.push(r.posterior_ritz.map_or(Cell::Empty, Cell::Float));
        row.push(Cell::Float(r.xi_norm));
        t.push(row);
    }
    t.meta.push(("eta".into(), crate::table::format_float(sw.eta)));
    t.meta.push(("grid".into(), sw.grid.name().into()));
    t.meta.push(("stopping".into(), format!("{:?}", stop.rule())));
    t.plot = Some(PlotLayout {
        x: "n".into(),
        y: vec!["k".into()],
        group: None,
        scale: PlotScale::Linear,
        markers: false,
    });
    Ok(t)
}

/// Error, `‖ξ‖` and scaling term at each requested `k` on one matrix.
struct ScalingPoint {
    k: usize,
    error: f64,
    xi: f64,
    scaling: f64,
}

fn scaling_points(p: &Problem, ks: &[usize], reorthogonalize: bool) -> CliResult<Vec<ScalingPoint>> {
    let x_exact = p.solve(&p.b)?;
    let reference = p.reference(FunctionKind::Sqrt)?;
    let k_top = *ks.iter().max().expect("nonempty");
    let mut d = ArnoldiDecomposition::new(&p.b)?.with_reorthogonalization(reorthogonalize);
    d.extend(&p.op, k_top)?;
    let mut out = Vec::new();
    for &k in ks {
        if k > d.k() {
            break;
        }
        let view = d.prefix(k);
        let approx = arnoldi_fun_action(&view, FunctionKind::Sqrt)?;
        let error = norm2(&sub(&approx, &reference));
        let xi = fom_error_norm_exact(&view, &x_exact)?;
        if xi == 0.0 {
            break;
        }
        out.push(ScalingPoint {
            k,
            error,
            xi,
            scaling: scaling_term(error, xi, k)?,
        });
    }
    Ok(out)
}

fn require_oracle_sqrt(cfg: &Config, what: &str) -> CliResult<()> {
    if !cfg.oracle {
        return Err(invalid(format!("{what} needs the reference oracle; drop --no-oracle")));
    }
    if FunctionKind::from(cfg.function) != FunctionKind::Sqrt {
        return Err(invalid(format!("{what} is defined for function sqrt only")));
    }
    Ok(())
}

fn scaling_columns() -> Vec<Column> {
    vec![
        Column::new("n", ColumnType::Integer, "grid size, h = 1/n"),
        Column::new("sigma_max", ColumnType::Float, "largest singular value"),
        Column::new("k", ColumnType::Integer, "Krylov subspace dimension"),
        Column::new(
            "error_norm",
            ColumnType::Float,
            "true error of the Arnoldi approximation",
        ),
        Column::new("xi_norm", ColumnType::Float, "FOM error norm of Mx = b"),
        Column::new(
            "scaling_term",
            ColumnType::Float,
            "error / xi_norm with the a priori constant removed",
        ),
    ]
}

fn scaling_vs_k(cfg: &Config) -> CliResult<Table> {
    require_oracle_sqrt(cfg, "scaling_vs_k")?;
    let sw = convdiff_sweep(cfg)?;
    let points = cfg.sweep.points.unwrap_or(DEFAULT_SCALING_POINTS);
    let frac = cfg.sweep.k_fraction.unwrap_or(DEFAULT_K_FRACTION);
    if points < 4 {
        return Err(invalid("sweep.points must be at least 4"));
    }
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(invalid(format!("sweep.k_fraction must lie in (0, 1], got {frac}")));
    }
    let mut t = Table::new("scaling_vs_k", scaling_columns());
    let mut slopes = Vec::new();
    let mut series = Vec::new();
    for &n in &sw.sizes {
        let p = convdiff_problem(cfg, &sw, n)?;
        let k_hi = ((frac * p.n() as f64).floor() as usize).clamp(3, p.n());
        let ks = lin_spaced(2, k_hi, points);
        let sigma = p.sigma_max()?;
        let pts = scaling_points(&p, &ks, cfg.reorthogonalize)?;
        for q in &pts {
            t.push(vec![
                Cell::Int(n as i64),
                Cell::Float(sigma),
                Cell::Int(q.k as i64),
                Cell::Float(q.error),
                Cell::Float(q.xi),
                Cell::Float(q.scaling),
            ]);
        }
        let ks: Vec<f64> = pts.iter().map(|q| q.k as f64).collect();
        let st: Vec<f64> = pts.iter().map(|q| q.scaling).collect();
        let fit = fit_slopes(&ks, &st)?;
        t.summary.push((format!("slope_n{n}"), fit.second_half));
        t.summary.push((format!("slope_full_range_n{n}"), fit.full_range));
        slopes.push(fit.second_half);
        series.push((ks, st));
    }
    t.summary
        .push(("slope_mean".into(), slopes.iter().sum::<f64>() / slopes.len() as f64));
    t.summary.push(("slope_pooled".into(), pooled_slope(&series)?));
    t.meta.push(("eta".into(), crate::table::format_float(sw.eta)));
    t.meta.push(("grid".into(), sw.grid.name().into()));
    t.meta.push((
        "fit".into(),
        "least squares of log(scaling_term) on log(k) over k >= (k_min + k_max)/2; slope_pooled shares one slope across n with a separate intercept per n".into(),
    ));
    t.plot = Some(PlotLayout {
        x: "k".into(),
        y: vec!["scaling_term".into()],
        group: Some("n".into()),
        scale: PlotScale::LogLog,
        markers: false,
    });
    Ok(t)
}

fn scaling_vs_sigma(cfg: &Config) -> CliResult<Table> {
    require_oracle_sqrt(cfg, "scaling_vs_sigma")?;
    let sw = convdiff_sweep(cfg)?;
    let mut k_values = cfg.sweep.k_values.clone().unwrap_or_else(|| vec![DEFAULT_SIGMA_K]);
    k_values.sort_unstable();
    k_values.dedup();
    if k_values.first().is_some_and(|&k| k < 2) || k_values.is_empty() {
        return Err(invalid("sweep.k_values must be nonempty with every k >= 2"));
    }
    let mut t = Table::new("scaling_vs_sigma", scaling_columns());
    let mut per_k: Vec<(usize, Vec<f64>, Vec<f64>)> = k_values.iter().map(|&k| (k, vec![], vec![])).collect();
    for &n in &sw.sizes {
        let p = convdiff_problem(cfg, &sw, n)?;
        if let Some(&k) = k_values.iter().find(|&&k| k >= p.n()) {
            return Err(invalid(format!(
                "k = {k} is not below the dimension {} for n = {n}",
                p.n()
            )));
        }
        let sigma = p.sigma_max()?;
        for q in scaling_points(&p, &k_values, cfg.reorthogonalize)? {
            t.push(vec![
                Cell::Int(n as i64),
                Cell::Float(sigma),
                Cell::Int(q.k as i64),
                Cell::Float(q.error),
                Cell::Float(q.xi),
                Cell::Float(q.scaling),
            ]);
            let e = per_k.iter_mut().find(|e| e.0 == q.k).expect("requested k");
            e.1.push(sigma.ln());
            e.2.push(q.scaling.ln());
        }
    }
    for (k, x, y) in &per_k {
        if let Some(s) = ls_slope(x, y) {
            t.summary.push((format!("slope_k{k}"), s));
        }
    }
    t.summary.push(("predicted_slope".into(), 1.5));
    t.meta.push(("eta".into(), crate::table::format_float(sw.eta)));
    t.meta.push(("grid".into(), sw.grid.name().into()));
    t.plot = Some(PlotLayout {
        x: "sigma_max".into(),
        y: vec!["scaling_term".into()],
        group: Some("k".into()),
        scale: PlotScale::LogLog,
        markers: false,
    });
    Ok(t)
}

fn perturbed_validity(cfg: &Config) -> CliResult<Table> {
    require_oracle_sqrt(cfg, "perturbed_validity")?;
    let matrix = cfg.matrix()?;
    if !matches!(matrix, MatrixConfig::Spectrum { .. }) {
        return Err(invalid("perturbed_validity needs a spectrum matrix"));
    }
    let eps_list = cfg.sweep.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec());
    if eps_list.is_empty() || eps_list.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(invalid("sweep.eps must be nonempty and nonnegative"));
    }
    let instances = cfg.sweep.instances.unwrap_or(DEFAULT_INSTANCES);
    if instances == 0 {
        return Err(invalid("sweep.instances must be positive"));
    }
    let mode = cfg.sweep.perturbation.unwrap_or_default().into();
    let cols = vec![
        Column::new(
            "instance",
            ColumnType::Integer,
            "instance index; its seed is seed + instance",
        ),
        Column::new("eps_requested", ColumnType::Float, "requested relative perturbation"),
        Column::new("eps", ColumnType::Float, "achieved relative perturbation"),
        Column::new("halvings", ColumnType::Integer, "budget halvings to keep positivity"),
        Column::new("k", ColumnType::Integer, "Krylov subspace dimension"),
        Column::new(
            "error_norm",
            ColumnType::Float,
            "error against the unperturbed square root",
        ),
        Column::new("bound_perturbed", ColumnType::Float, "perturbed-matrix bound"),
        Column::new("ratio", ColumnType::Float, "error_norm / bound_perturbed"),
        Column::new("holds", ColumnType::Integer, "1 when error_norm <= bound_perturbed"),
    ];
    let mut t = Table::new("perturbed_validity", cols);
    let (mut violations, mut max_ratio) = (0usize, 0.0f64);
    for (ei, &eps) in eps_list.iter().enumerate() {
        for i in 0..instances {
            let idx = ei * instances + i;
            let seed = cfg.seed.wrapping_add(idx as u64);
            let p = Problem::build(matrix, cfg.rhs, seed)?;
            p.check_oracle_size(true)?;
            let Operator::Dense(m) = &p.op else { unreachable!() };
            let pert = perturb_matrix(m, &PerturbationSpec { eps, mode }, seed)?;
            let reference = p.reference(FunctionKind::Sqrt)?;
            let x_exact = LuFactorization::new(&pert.matrix)?.solve(&p.b);
            let b_norm = norm2(&p.b);
            let data = pert.data(b_norm);
            let mut d = ArnoldiDecomposition::new(&p.b)?.with_reorthogonalization(cfg.reorthogonalize);
            d.extend(&pert.matrix, cfg.k_max.min(p.n()))?;
            for k in 2..=d.k() {
                let view = d.prefix(k);
                let approx = arnoldi_fun_action(&view, FunctionKind::Sqrt)?;
                let error = norm2(&sub(&approx, &reference));
                let xi = fom_error_norm_exact(&view, &x_exact)?;
                let bound = bound_perturbed(&data, k, xi)?;
                let holds = error <= bound;
                violations += usize::from(!holds);
                max_ratio = max_ratio.max(error / bound);
                t.push(vec![
                    Cell::Int(idx as i64),
                    Cell::Float(eps),
                    Cell::Float(pert.eps),
                    Cell::Int(pert.halvings as i64),
                    Cell::Int(k as i64),
                    Cell::Float(error),
                    Cell::Float(bound),
                    Cell::Float(error / bound),
                    Cell::Int(holds as i64),
                ]);
            }
        }
    }
    t.summary.push(("violations".into(), violations as f64));
    t.summary.push(("max_ratio".into(), max_ratio));
    t.meta.push(("perturbation".into(), mode.name().into()));
    t.plot = Some(PlotLayout {
        x: "k".into(),
        y: vec!["ratio".into()],
        group: Some("eps_requested".into()),
        scale: PlotScale::SemilogY,
        markers: true,
    });
    Ok(t)
}

/// The bound a stopping rule monitors, for reporting.
pub fn monitored_bound(stop: &StoppingConfig, f: FunctionKind) -> BoundKind {
    match stop {
        StoppingConfig::BoundAbsolute { bound, .. } => (*bound).into(),
        StoppingConfig::ResidualRelative { .. } => match f {
            FunctionKind::Sqrt => BoundKind::PosteriorRitz,
            _ => BoundKind::AprioriGamma,
        },
    }
}
