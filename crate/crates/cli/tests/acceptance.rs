//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`; pass criterion numbers after
//! `--` to run a subset (`cargo test --test acceptance -- 3 5`). Tolerances
//! are pinned as constants below.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use krylov_sqrt::arnoldi::{
    arnoldi_extend, arnoldi_fun_action, shifted_fom_quantities, sweep_reports, AdaptiveOptions, ArnoldiDecomposition,
    FunctionKind, StoppingRule, XiSource,
};
use krylov_sqrt::bounds::{quad_semi_infinite, BoundKind, QuadratureConfig};
use krylov_sqrt::linalg::vector::relative_error;
use krylov_sqrt::linalg::{lu_solve, reference_sqrt_action, DenseMatrix, C64};
use krylov_sqrt::matgen::{skew_part, spectrum_matrix, SpectrumKind, SpectrumSpec};
use krylov_sqrt_cli::experiments::run_experiment;
use krylov_sqrt_cli::{Config, Table};

// criterion 1
const TABLE_SIZES: [usize; 6] = [1000, 1200, 1400, 1600, 1800, 2000];
const TABLE_COND: [f64; 6] = [202320.64, 291138.58, 396074.49, 517128.36, 654300.20, 807590.00];
const TABLE_K: [f64; 6] = [889.0, 1071.0, 1253.0, 1435.0, 1617.0, 1800.0];
const TABLE_ERR: [f64; 6] = [0.03083, 0.03053, 0.03061, 0.03090, 0.03132, 0.03132];
const COND_RTOL: f64 = 1e-3;
const K_RTOL: f64 = 0.02;
const ERR_RTOL: f64 = 0.10;
// criterion 2
const SLOPE_TARGET: f64 = -0.75;
const SLOPE_TOL: f64 = 0.15;
const SLOPE_POINTS: usize = 21;
// criterion 3
const CHAIN_INSTANCES: u64 = 100;
const CHAIN_K_MAX: usize = 30;
const CHAIN_SLACK: f64 = 1e-8;
// criterion 4
const RATIO_LIMIT: f64 = 0.1;
// criterion 5
const QUAD_RTOL: f64 = 1e-6;
// criterion 6
const EXACT_RTOL: f64 = 1e-8;
// criterion 7
const PERTURBED_K_MAX: usize = 20;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn ones(n: usize) -> Vec<C64> {
    vec![c(1.0); n]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn config(json: &str) -> Config {
    Config::from_json(json).expect("pinned config is valid")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn table_reproduction() -> Outcome {
    let cfg = config(
        r#"{
  "version": 1,
  "experiment": "convdiff_table",
  "matrix": { "kind": "convection_diffusion", "n": 1000, "eta": 0.1, "grid": "full" },
  "stopping": { "rule": "bound_absolute", "tol": 0.05, "bound": "posterior_ritz" },
  "k_max": 2000,
  "check_stride": 50,
  "full_history": false,
  "sweep": { "sizes": [1000, 1200, 1400, 1600, 1800, 2000] }
}"#,
    );
    let t = run_experiment(&cfg).expect("convdiff_table runs");
    let col = |name: &str| t.column_f64(name).expect("numeric column");
    let (n, sigma, cond, k, err) = (col("n"), col("sigma_max"), col("cond"), col("k"), col("error_norm"));
    let mut pass = n.len() == TABLE_SIZES.len();
    println!("       n   sigma_max        cond(rel dev)         k(rel dev)      error(rel dev)");
    for i in 0..n.len().min(TABLE_SIZES.len()) {
        let (dc, dk, de) = (
            rel(cond[i], TABLE_COND[i]),
            rel(k[i], TABLE_K[i]),
            rel(err[i], TABLE_ERR[i]),
        );
        pass &= n[i] as usize == TABLE_SIZES[i] && dc <= COND_RTOL && dk <= K_RTOL && de <= ERR_RTOL;
        println!(
            "    {:>4}  {:.6e}  {:.2} ({:+.1e})  {:>5} ({:+.1e})  {:.5} ({:+.1e})",
            n[i], sigma[i], cond[i], dc, k[i], dk, err[i], de
        );
    }
    outcome(
        pass,
        format!("cond within {COND_RTOL}, k within {K_RTOL}, error within {ERR_RTOL} (relative), full grid"),
    )
}

fn slope_law() -> Outcome {
    let cfg = config(&format!(
        r#"{{
  "version": 1,
  "experiment": "scaling_vs_k",
  "matrix": {{ "kind": "convection_diffusion", "n": 1000, "eta": 0.1, "grid": "full" }},
  "sweep": {{ "sizes": [1000, 1200, 1400, 1600, 1800, 2000], "points": {SLOPE_POINTS}, "k_fraction": 0.9 }}
}}"#
    ));
    let t = run_experiment(&cfg).expect("scaling_vs_k runs");
    for n in TABLE_SIZES {
        let s = t.summary_value(&format!("slope_n{n}")).unwrap_or(f64::NAN);
        let f = t.summary_value(&format!("slope_full_range_n{n}")).unwrap_or(f64::NAN);
        println!("    n = {n}: second-half slope {s:.4}, full-range slope {f:.4}");
    }
    let pooled = t.summary_value("slope_pooled").unwrap_or(f64::NAN);
    outcome(
        (pooled - SLOPE_TARGET).abs() <= SLOPE_TOL,
        format!("pooled second-half slope {pooled:.4}, required {SLOPE_TARGET} +- {SLOPE_TOL}"),
    )
}

/// Seeded instance `i` of the mixed family: uniform or clustered spectra,
/// with or without a skew part, `n` between 40 and 200.
fn chain_instance(i: u64) -> (DenseMatrix, Vec<C64>) {
    let n = 40 + ((i * 37) % 161) as usize;
    let kind = match i % 4 {
        0 | 1 => SpectrumKind::Uniform {
            lo: 1.0,
            hi: 10f64.powi(1 + (i % 3) as i32),
        },
        _ => SpectrumKind::Clustered {
            cluster_center: 10.0,
            cluster_std: 1.0,
            cluster_fraction: 0.9,
            outlier_center: 500.0,
            outlier_std: 50.0,
        },
    };
    let s = spectrum_matrix(&SpectrumSpec { kind, n }, 1000 + i).expect("spectrum");
    let m = if i % 2 == 1 {
        s.matrix
            .add(&skew_part(n, 2000 + i, 0.5 * s.eigs[0].sqrt()).expect("skew"))
    } else {
        s.matrix
    };
    (m, ones(n))
}

/// Single-pass modified Gram-Schmidt loses orthogonality on the clustered
/// symmetric instances around k = 20 and produces spurious Ritz values near
/// zero, where the posterior bounds are undefined. The chain is therefore
/// checked with one reorthogonalization pass; the plain runs that fail are
/// counted and reported.
fn chain_validity() -> Outcome {
    let mut violations = Vec::new();
    let mut checked = 0usize;
    let mut plain_failures = 0usize;
    let ks: Vec<usize> = (2..=CHAIN_K_MAX).collect();
    for i in 0..CHAIN_INSTANCES {
        let (m, b) = chain_instance(i);
        let x = lu_solve(&m, &b).expect("solve");
        let mut opts = AdaptiveOptions::new(
            FunctionKind::Sqrt,
            StoppingRule::ResidualRelative(1e-12),
            CHAIN_K_MAX,
            XiSource::Exact(x),
        );
        opts.reference = Some(reference_sqrt_action(&m, &b).expect("reference"));
        plain_failures += usize::from(sweep_reports(&m, &b, &opts, &ks).is_err());
        opts.reorthogonalize = true;
        let (_, reports) = sweep_reports(&m, &b, &opts, &ks).expect("sweep");
        for r in &reports {
            let e = r.error_norm.expect("error");
            let chain = [
                e,
                r.bound(BoundKind::PosteriorRitz).expect("ritz"),
                r.bound(BoundKind::PosteriorModulus).expect("modulus"),
                r.bound(BoundKind::AprioriGamma).expect("gamma"),
            ];
            checked += 1;
            if chain.windows(2).any(|w| w[0] > w[1] + CHAIN_SLACK) {
                violations.push(format!("instance {i} k {}: {chain:?}", r.k));
            }
        }
    }
    for v in violations.iter().take(5) {
        println!("    {v}");
    }
    println!("    without reorthogonalization {plain_failures} of {CHAIN_INSTANCES} instances hit a Ritz value on the branch cut");
    outcome(
        violations.is_empty(),
        format!(
            "{CHAIN_INSTANCES} instances, {checked} (instance, k) pairs, {} violations of error <= ritz <= modulus <= gamma (slack {CHAIN_SLACK})",
            violations.len()
        ),
    )
}

fn hermitian_sharpening() -> Outcome {
    let cfg = config(
        r#"{
  "version": 1,
  "experiment": "hermitian_compare",
  "matrix": {
    "kind": "spectrum",
    "n": 500,
    "spectrum": {
      "distribution": "clustered",
      "cluster_center": 10.0, "cluster_std": 1.0, "cluster_fraction": 0.99,
      "outlier_center": 1000.0, "outlier_std": 100.0
    }
  },
  "rhs": { "kind": "eig_average", "count": 100 },
  "k_max": 100,
  "reorthogonalize": true,
  "seed": 42
}"#,
    );
    let t = run_experiment(&cfg).expect("hermitian_compare runs");
    let above = t.summary_value("jensen_above_loose").unwrap_or(f64::NAN);
    let decreasing = t.summary_value("lambda_bar_strictly_decreasing").unwrap_or(f64::NAN);
    let ratio = t.summary_value("max_ratio_k_ge_50").unwrap_or(f64::NAN);
    outcome(
        above == 0.0 && decreasing == 1.0 && ratio < RATIO_LIMIT,
        format!(
            "jensen > loose at {above} k, lambda_bar strictly decreasing = {decreasing}, max ratio for k >= 50 = {ratio:.4} (< {RATIO_LIMIT})"
        ),
    )
}

/// ln Γ by Stirling's series after shifting the argument above 30.
fn ln_gamma_stirling(x: f64) -> f64 {
    let (mut z, mut shift) = (x, 0.0);
    while z < 30.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

fn quadrature_oracles() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    let mut check = |name: String, got: f64, expect: f64| {
        let d = rel(got, expect);
        worst = worst.max(d);
        lines.push(format!("    {name}: {got:.15} vs {expect:.15} (rel {d:.1e})"));
    };
    let r = quad_semi_infinite(|x| x.sqrt() / (1.0 + x).powi(2), &cfg).expect("quad");
    check("sqrt(x)/(1+x)^2".into(), r.value, PI / 2.0);
    let r = quad_semi_infinite(|x| x.sqrt() / (1.0 + x * x), &cfg).expect("quad");
    check("sqrt(x)/(1+x^2)".into(), r.value, PI / SQRT_2);
    for (sigma, k) in [(1.0f64, 4i32), (2.0, 4), (5.0, 7)] {
        let r = quad_semi_infinite(
            |x| x.sqrt() * sigma.powi(k) / (sigma * sigma + x * x).powf(k as f64 / 2.0),
            &cfg,
        )
        .expect("quad");
        let (a, bb) = (0.75, (2.0 * k as f64 - 3.0) / 4.0);
        let beta = (ln_gamma_stirling(a) + ln_gamma_stirling(bb) - ln_gamma_stirling(a + bb)).exp();
        check(
            format!("beta identity sigma={sigma} k={k}"),
            r.value,
            sigma.powf(1.5) / 2.0 * beta,
        );
    }
    for l in &lines {
        println!("{l}");
    }
    outcome(
        worst <= QUAD_RTOL,
        format!("worst relative deviation {worst:.2e} (<= {QUAD_RTOL})"),
    )
}

/// Seeded instance `i` of the small family: `n` between 10 and 50, uniform
/// spectra over one to three decades, every other one with a skew part.
fn small_instance(i: u64) -> (DenseMatrix, Vec<C64>) {
    let n = 10 + (i as usize * 7) % 41;
    let spec = SpectrumSpec {
        kind: SpectrumKind::Uniform {
            lo: 1.0,
            hi: 10f64.powi(1 + (i % 3) as i32),
        },
        n,
    };
    let s = spectrum_matrix(&spec, 3000 + i).expect("spectrum");
    let m = if i % 2 == 1 {
        s.matrix.add(&skew_part(n, 4000 + i, s.eigs[0].sqrt()).expect("skew"))
    } else {
        s.matrix
    };
    (m, ones(n))
}

fn exactness() -> Outcome {
    let mut worst_full: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for i in 0..20u64 {
        let (m, b) = small_instance(i);
        let n = b.len();
        let d = arnoldi_extend(&m, ArnoldiDecomposition::new(&b).expect("b"), n).expect("arnoldi");
        let x = arnoldi_fun_action(&d.view(), FunctionKind::Sqrt).expect("action");
        worst_full = worst_full.max(relative_error(&x, &reference_sqrt_action(&m, &b).expect("reference")));
        let d = arnoldi_extend(&m, ArnoldiDecomposition::new(&b).expect("b"), 5.min(n - 1)).expect("arnoldi");
        for z in [c(-1.0), C64::new(-0.5, 2.0), C64::new(0.0, 3.0)] {
            let s = shifted_fom_quantities(&d.view(), &m, &b, z).expect("shifted");
            worst_shift = worst_shift
                .max(relative_error(&s.residual_formula, &s.residual_direct))
                .max(relative_error(&s.error_formula, &s.error_direct));
        }
    }

    // breakdown: identity, and b inside a two-dimensional invariant subspace
    let mut breakdown_ok = true;
    let id = DenseMatrix::identity(6);
    let d = arnoldi_extend(&id, ArnoldiDecomposition::new(&ones(6)).expect("b"), 6).expect("arnoldi");
    let x = arnoldi_fun_action(&d.view(), FunctionKind::Sqrt).expect("action");
    breakdown_ok &= d.k() == 1 && d.breakdown() && relative_error(&x, &ones(6)) <= EXACT_RTOL;
    let diag = DenseMatrix::from_diagonal(&[c(1.0), c(4.0), c(9.0), c(16.0), c(25.0)]);
    let b = vec![c(3.0), c(1.0), c(0.0), c(0.0), c(0.0)];
    let d = arnoldi_extend(&diag, ArnoldiDecomposition::new(&b).expect("b"), 5).expect("arnoldi");
    let x = arnoldi_fun_action(&d.view(), FunctionKind::Sqrt).expect("action");
    breakdown_ok &=
        d.k() == 2 && d.breakdown() && relative_error(&x, &[c(3.0), c(2.0), c(0.0), c(0.0), c(0.0)]) <= EXACT_RTOL;

    outcome(
        worst_full <= EXACT_RTOL && worst_shift <= EXACT_RTOL && breakdown_ok,
        format!(
            "k = n worst rel error {worst_full:.1e}, shift identities worst {worst_shift:.1e} (<= {EXACT_RTOL}), breakdown cases exact = {breakdown_ok}"
        ),
    )
}

fn perturbed_validity() -> Outcome {
    let cfg = config(&format!(
        r#"{{
  "version": 1,
  "experiment": "perturbed_validity",
  "matrix": {{ "kind": "spectrum", "n": 100, "spectrum": {{ "distribution": "uniform", "lo": 1.0, "hi": 100.0 }}, "skew_scale": 1.0 }},
  "k_max": {PERTURBED_K_MAX},
  "seed": 7,
  "sweep": {{ "eps": [1e-4, 1e-3, 1e-2], "instances": 10 }}
}}"#
    ));
    let t: Table = run_experiment(&cfg).expect("perturbed_validity runs");
    let ks = t.column_f64("k").expect("k");
    let covered = ks.iter().all(|&k| (2.0..=PERTURBED_K_MAX as f64).contains(&k));
    let violations = t.summary_value("violations").unwrap_or(f64::NAN);
    let ratio = t.summary_value("max_ratio").unwrap_or(f64::NAN);
    let triples = t.rows.len() / (PERTURBED_K_MAX - 1);
    outcome(
        violations == 0.0 && covered && triples == 30,
        format!(
            "{triples} triples, {} rows, {violations} violations, max error/bound {ratio:.3}",
            t.rows.len()
        ),
    )
}

type Criterion = (usize, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 7] = [
    (1, "convection-diffusion table", table_reproduction),
    (2, "scaling-term slope", slope_law),
    (3, "bound chain on seeded instances", chain_validity),
    (4, "Hermitian sharpening", hermitian_sharpening),
    (5, "closed-form quadrature", quadrature_oracles),
    (6, "exactness and shift identities", exactness),
    (7, "perturbed bound validity", perturbed_validity),
];

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        println!("criterion {id}: {name}");
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {id} ({name}): {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
