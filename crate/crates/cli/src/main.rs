use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use krylov_sqrt::arnoldi::StopStatus;
use krylov_sqrt_cli::commands::{cmd_approx, cmd_experiment, cmd_matgen, describe_summary};
use krylov_sqrt_cli::error::{EXIT_BUDGET, EXIT_OK, EXIT_VALIDATION};
use krylov_sqrt_cli::plot::plot_file;
use krylov_sqrt_cli::table::PlotScale;
use krylov_sqrt_cli::{CliError, CliResult, Config, Overrides};

/// Arnoldi approximation of M^{1/2} b with certified error bounds.
#[derive(Parser)]
#[command(name = "krylov-sqrt", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the random matrix generators
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance of the stopping rule
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget
    #[arg(long)]
    kmax: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// MatrixMarket file replacing the configured matrix
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Skip the reference f(M)b and the error column
    #[arg(long)]
    no_oracle: bool,
}

impl Common {
    fn config(&self) -> CliResult<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        cfg.apply(&Overrides {
            seed: self.seed,
            tol: self.tol,
            k_max: self.kmax,
            out: self.out.clone(),
            matrix_file: self.matrix_file.clone(),
            no_oracle: self.no_oracle,
        })?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Approximate f(M)b adaptively; writes result.mtx and history.csv
    Approx(Common),
    /// Run the experiment named in the config; writes <experiment>.csv
    Experiment(Common),
    /// Render an experiment CSV as SVG
    Plot {
        csv: PathBuf,
        /// linear, semilogy or loglog; defaults to the CSV's layout
        #[arg(long)]
        kind: Option<String>,
        /// Output .svg file or directory; defaults next to the CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the configured matrix and right-hand side as MatrixMarket
    Matgen(Common),
}

fn run(cmd: Cmd) -> CliResult<i32> {
    match cmd {
        Cmd::Approx(c) => {
            let cfg = c.config()?;
            let o = cmd_approx(&cfg)?;
            let status = match o.status {
                StopStatus::RuleSatisfied => "rule satisfied",
                StopStatus::Breakdown => "breakdown (exact)",
                StopStatus::BudgetExhausted => "budget exhausted",
            };
            println!("k = {} ({status})", o.k);
            match o.bound {
                Some(b) => println!("{} = {b:.6e}", o.bound_kind.name()),
                None => println!("{} not available", o.bound_kind.name()),
            }
            if let Some(e) = o.error {
                println!("error_norm = {e:.6e}");
            }
            println!("wrote {} and {}", o.result_path.display(), o.history_path.display());
            if o.status == StopStatus::BudgetExhausted {
                eprintln!("error: {}", CliError::BudgetExhausted { k_max: o.k });
                return Ok(EXIT_BUDGET);
            }
        }
        Cmd::Experiment(c) => {
            let cfg = c.config()?;
            if cfg.experiment.is_none() {
                return Err(CliError::Validation(
                    "experiment needs --config with an \"experiment\" field".into(),
                ));
            }
            let (t, path) = cmd_experiment(&cfg)?;
            println!("{}: {} rows -> {}", t.experiment, t.rows.len(), path.display());
            for line in describe_summary(&t) {
                println!("  {line}");
            }
        }
        Cmd::Plot { csv, kind, out } => {
            let scale = kind
                .map(|k| {
                    PlotScale::from_name(&k).ok_or_else(|| CliError::Validation(format!("unknown plot kind '{k}'")))
                })
                .transpose()?;
            let target = match out {
                Some(p) if p.extension().is_some_and(|e| e == "svg") => p,
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(CliError::io(dir.display().to_string()))?;
                    dir.join(csv.with_extension("svg").file_name().expect("csv file name"))
                }
                None => csv.with_extension("svg"),
            };
            plot_file(&csv, scale, &target)?;
            println!("wrote {}", target.display());
        }
        Cmd::Matgen(c) => {
            let cfg = c.config()?;
            let (m, b) = cmd_matgen(&cfg)?;
            println!("wrote {} and {}", m.display(), b.display());
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli.cmd) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
