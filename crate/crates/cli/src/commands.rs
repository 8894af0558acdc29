//! The four subcommands, minus argument parsing.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use krylov_sqrt::arnoldi::{run_adaptive, PosteriorRoute, StopStatus, StoppingRule};
use krylov_sqrt::bounds::BoundKind;
use krylov_sqrt::linalg::{DenseMatrix, C64};
use krylov_sqrt::mmio::{write_matrix_market, write_tridiagonal};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::experiments::{monitored_bound, report_table, run_experiment, run_options, semilog_layout, status_name};
use crate::problem::{Operator, Problem};
use crate::table::{format_float, Table};

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir.display().to_string()))
}

fn write_vector(path: &Path, v: &[C64]) -> CliResult<()> {
    let m = DenseMatrix::from_col_major(v.len(), 1, v.to_vec())?;
    let f = File::create(path).map_err(CliError::io(path.display().to_string()))?;
    write_matrix_market(BufWriter::new(f), &m)?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ApproxOutcome {
    pub k: usize,
    pub status: StopStatus,
    pub bound_kind: BoundKind,
    pub bound: Option<f64>,
    pub error: Option<f64>,
    pub result_path: PathBuf,
    pub history_path: PathBuf,
}

/// Runs the adaptive iteration and writes `result.mtx` and `history.csv`.
/// Budget exhaustion is reported in the outcome, not as an error, so the
/// files are still written.
pub fn cmd_approx(cfg: &Config) -> CliResult<ApproxOutcome> {
    let p = Problem::build(cfg.matrix()?, cfg.rhs, cfg.seed)?;
    p.check_oracle_size(cfg.oracle)?;
    let f = cfg.function.into();
    let stop = cfg.stopping_or_default();
    let mut opts = run_options(cfg, &p, f, stop.rule())?;
    if matches!(p.op, Operator::Tridiagonal(_)) && matches!(stop.rule(), StoppingRule::BoundAbsolute { .. }) {
        opts.route = PosteriorRoute::Determinant;
    }
    let out = run_adaptive(&p.op, &p.b, &opts)?;
    let dir = cfg.output_dir();
    create_dir(&dir)?;
    let result_path = dir.join("result.mtx");
    write_vector(&result_path, &out.result)?;
    let mut t = report_table("approx", &out.history)?;
    t.meta.push(("n".into(), p.n().to_string()));
    t.meta.push(("function".into(), f.name().into()));
    t.meta.push(("stopping".into(), format!("{:?}", stop.rule())));
    t.meta.push(("status".into(), status_name(out.status).into()));
    t.meta.push(("k".into(), out.k.to_string()));
    t.plot = Some(semilog_layout(&t));
    let history_path = dir.join("history.csv");
    t.write_file(&history_path)?;
    let bound_kind = monitored_bound(&stop, f);
    let r = out.final_report();
    Ok(ApproxOutcome {
        k: out.k,
        status: out.status,
        bound_kind,
        bound: r.bound(bound_kind),
        error: r.error_norm,
        result_path,
        history_path,
    })
}

pub fn cmd_experiment(cfg: &Config) -> CliResult<(Table, PathBuf)> {
    let t = run_experiment(cfg)?;
    let dir = cfg.output_dir();
    create_dir(&dir)?;
    let path = dir.join(format!("{}.csv", t.experiment));
    t.write_file(&path)?;
    Ok((t, path))
}

/// Writes the configured matrix and right-hand side as MatrixMarket files.
pub fn cmd_matgen(cfg: &Config) -> CliResult<(PathBuf, PathBuf)> {
    let p = Problem::build(cfg.matrix()?, cfg.rhs, cfg.seed)?;
    let dir = cfg.output_dir();
    create_dir(&dir)?;
    let mpath = dir.join("matrix.mtx");
    let f = File::create(&mpath).map_err(CliError::io(mpath.display().to_string()))?;
    match &p.op {
        Operator::Dense(m) => write_matrix_market(BufWriter::new(f), m)?,
        Operator::Tridiagonal(t) => write_tridiagonal(BufWriter::new(f), t)?,
    }
    let bpath = dir.join("rhs.mtx");
    write_vector(&bpath, &p.b)?;
    Ok((mpath, bpath))
}

pub fn describe_summary(t: &Table) -> Vec<String> {
    t.summary
        .iter()
        .map(|(k, v)| format!("{k} = {}", format_float(*v)))
        .collect()
}
