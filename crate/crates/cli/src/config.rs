//! JSON run configuration. Versioned; unknown keys are rejected at every
//! level. Command-line flags are applied on top with [`Overrides`].

use std::path::{Path, PathBuf};

use krylov_sqrt::arnoldi::{FunctionKind, StoppingRule};
use krylov_sqrt::bounds::{BoundKind, QuadratureConfig};
use krylov_sqrt::matgen::{GridConvention, PerturbationMode, RhsKind, SpectrumKind, SpectrumSpec};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, CliResult};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BoundsVsK,
    HermitianCompare,
    ConvdiffTable,
    ScalingVsK,
    ScalingVsSigma,
    PerturbedValidity,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::BoundsVsK => "bounds_vs_k",
            ExperimentKind::HermitianCompare => "hermitian_compare",
            ExperimentKind::ConvdiffTable => "convdiff_table",
            ExperimentKind::ScalingVsK => "scaling_vs_k",
            ExperimentKind::ScalingVsSigma => "scaling_vs_sigma",
            ExperimentKind::PerturbedValidity => "perturbed_validity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumConfig {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Clustered {
        cluster_center: f64,
        cluster_std: f64,
        cluster_fraction: f64,
        outlier_center: f64,
        outlier_std: f64,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridName {
    #[default]
    Full,
    Interior,
}

impl From<GridName> for GridConvention {
    fn from(g: GridName) -> Self {
        match g {
            GridName::Full => GridConvention::Full,
            GridName::Interior => GridConvention::Interior,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixConfig {
    /// `Q diag(Λ) Qᵀ + skew_scale · (R − Rᵀ)/2`.
    Spectrum {
        n: usize,
        spectrum: SpectrumConfig,
        #[serde(default)]
        skew_scale: f64,
    },
    ConvectionDiffusion {
        n: usize,
        eta: f64,
        #[serde(default)]
        grid: GridName,
    },
    File {
        path: PathBuf,
    },
}

impl MatrixConfig {
    pub fn spectrum_spec(&self) -> Option<SpectrumSpec> {
        match self {
            MatrixConfig::Spectrum { n, spectrum, .. } => Some(SpectrumSpec {
                n: *n,
                kind: match *spectrum {
                    SpectrumConfig::Uniform { lo, hi } => SpectrumKind::Uniform { lo, hi },
                    SpectrumConfig::Clustered {
                        cluster_center,
                        cluster_std,
                        cluster_fraction,
                        outlier_center,
                        outlier_std,
                    } => SpectrumKind::Clustered {
                        cluster_center,
                        cluster_std,
                        cluster_fraction,
                        outlier_center,
                        outlier_std,
                    },
                },
            }),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RhsConfig {
    #[default]
    Ones,
    EigAverage {
        count: usize,
    },
}

impl From<RhsConfig> for RhsKind {
    fn from(r: RhsConfig) -> Self {
        match r {
            RhsConfig::Ones => RhsKind::Ones,
            RhsConfig::EigAverage { count } => RhsKind::EigAverage(count),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionName {
    #[default]
    Sqrt,
    Invsqrt,
}

impl From<FunctionName> for FunctionKind {
    fn from(f: FunctionName) -> Self {
        match f {
            FunctionName::Sqrt => FunctionKind::Sqrt,
            FunctionName::Invsqrt => FunctionKind::InvSqrt,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    #[default]
    PosteriorRitz,
    PosteriorModulus,
    AprioriGamma,
    HermitianLoose,
    HermitianJensen,
}

impl From<BoundName> for BoundKind {
    fn from(b: BoundName) -> Self {
        match b {
            BoundName::PosteriorRitz => BoundKind::PosteriorRitz,
            BoundName::PosteriorModulus => BoundKind::PosteriorModulus,
            BoundName::AprioriGamma => BoundKind::AprioriGamma,
            BoundName::HermitianLoose => BoundKind::HermitianLoose,
            BoundName::HermitianJensen => BoundKind::HermitianJensen,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum StoppingConfig {
    ResidualRelative {
        tol: f64,
    },
    BoundAbsolute {
        tol: f64,
        #[serde(default)]
        bound: BoundName,
    },
}

impl StoppingConfig {
    /// The rule used when none is configured: relative FOM residual `1e-2`.
    pub const DEFAULT: StoppingConfig = StoppingConfig::ResidualRelative { tol: 1e-2 };

    pub fn tol(&self) -> f64 {
        match *self {
            StoppingConfig::ResidualRelative { tol } | StoppingConfig::BoundAbsolute { tol, .. } => tol,
        }
    }

    fn set_tol(&mut self, t: f64) {
        match self {
            StoppingConfig::ResidualRelative { tol } | StoppingConfig::BoundAbsolute { tol, .. } => *tol = t,
        }
    }

    pub fn rule(&self) -> StoppingRule {
        match *self {
            StoppingConfig::ResidualRelative { tol } => StoppingRule::ResidualRelative(tol),
            StoppingConfig::BoundAbsolute { tol, bound } => StoppingRule::BoundAbsolute {
                tol,
                kind: bound.into(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        Self {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_subdivisions: q.max_subdivisions,
        }
    }
}

impl From<QuadratureSettings> for QuadratureConfig {
    fn from(q: QuadratureSettings) -> Self {
        QuadratureConfig {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_subdivisions: q.max_subdivisions,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationName {
    #[default]
    HermitianRandom,
    SkewRandom,
}

impl From<PerturbationName> for PerturbationMode {
    fn from(p: PerturbationName) -> Self {
        match p {
            PerturbationName::HermitianRandom => PerturbationMode::HermitianRandom,
            PerturbationName::SkewRandom => PerturbationMode::SkewRandom,
        }
    }
}

/// Experiment-specific sweep parameters. Each experiment reads only the
/// fields it documents and rejects the others.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Grid sizes for the convection–diffusion sweeps.
    pub sizes: Option<Vec<usize>>,
    /// Fixed iteration counts for `scaling_vs_sigma`.
    pub k_values: Option<Vec<usize>>,
    /// Number of evenly spaced `k` samples for `scaling_vs_k`.
    pub points: Option<usize>,
    /// Largest sampled `k` as a fraction of the dimension, `scaling_vs_k`.
    pub k_fraction: Option<f64>,
    /// Relative perturbation sizes for `perturbed_validity`.
    pub eps: Option<Vec<f64>>,
    /// Instances per perturbation size.
    pub instances: Option<usize>,
    pub perturbation: Option<PerturbationName>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    #[serde(default)]
    pub matrix: Option<MatrixConfig>,
    #[serde(default)]
    pub rhs: RhsConfig,
    #[serde(default)]
    pub function: FunctionName,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default)]
    pub stopping: Option<StoppingConfig>,
    /// Evaluate the stopping rule every `check_stride` steps, bisecting back
    /// once it passes.
    #[serde(default = "default_stride")]
    pub check_stride: usize,
    /// Record every bound at every checked `k`, not just the monitored one.
    #[serde(default = "default_true")]
    pub full_history: bool,
    /// Second Gram–Schmidt pass against the whole basis.
    #[serde(default)]
    pub reorthogonalize: bool,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub oracle: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn default_k_max() -> usize {
    100
}

fn default_stride() -> usize {
    1
}

fn default_true() -> bool {
    true
}

impl Default for Config {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            experiment: None,
            matrix: None,
            rhs: RhsConfig::default(),
            function: FunctionName::default(),
            k_max: default_k_max(),
            stopping: None,
            check_stride: default_stride(),
            full_history: true,
            reorthogonalize: false,
            quadrature: QuadratureSettings::default(),
            seed: 0,
            oracle: true,
            output_dir: None,
            sweep: SweepConfig::default(),
        }
    }
}

/// Values given on the command line; each replaces the config field.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub k_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub matrix_file: Option<PathBuf>,
    pub no_oracle: bool,
}

impl Config {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path.display().to_string()))?;
        Self::from_json(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(k) = o.k_max {
            self.k_max = k;
        }
        if let Some(t) = o.tol {
            self.stopping.get_or_insert(StoppingConfig::DEFAULT).set_tol(t);
        }
        if let Some(out) = &o.out {
            self.output_dir = Some(out.clone());
        }
        if let Some(p) = &o.matrix_file {
            self.matrix = Some(MatrixConfig::File { path: p.clone() });
        }
        if o.no_oracle {
            self.oracle = false;
        }
        self.validate()
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.k_max < 2 {
            return Err(invalid(format!("k_max must be at least 2, got {}", self.k_max)));
        }
        if self.check_stride == 0 {
            return Err(invalid("check_stride must be positive"));
        }
        if let Some(s) = &self.stopping {
            if !(s.tol().is_finite() && s.tol() > 0.0) {
                return Err(invalid(format!("stopping tolerance must be positive, got {}", s.tol())));
            }
        }
        QuadratureConfig::from(self.quadrature).validate()?;
        match &self.matrix {
            Some(MatrixConfig::Spectrum { skew_scale, .. }) => {
                self.matrix
                    .as_ref()
                    .and_then(MatrixConfig::spectrum_spec)
                    .expect("spectrum")
                    .validate()?;
                if !skew_scale.is_finite() {
                    return Err(invalid("skew_scale must be finite"));
                }
            }
            Some(MatrixConfig::ConvectionDiffusion { n, eta, .. }) if (*n < 3 || !(eta.is_finite() && *eta > 0.0)) => {
                return Err(invalid(format!(
                    "convection_diffusion needs n >= 3 and eta > 0, got n = {n}, eta = {eta}"
                )));
            }
            _ => {}
        }
        if let RhsConfig::EigAverage { count } = self.rhs {
            if !matches!(self.matrix, Some(MatrixConfig::Spectrum { .. }) | None) {
                return Err(invalid("rhs eig_average needs a spectrum matrix"));
            }
            if count == 0 {
                return Err(invalid("rhs eig_average count must be positive"));
            }
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn stopping_or_default(&self) -> StoppingConfig {
        self.stopping.unwrap_or(StoppingConfig::DEFAULT)
    }

    pub fn matrix(&self) -> CliResult<&MatrixConfig> {
        self.matrix
            .as_ref()
            .ok_or_else(|| invalid("no matrix given: set \"matrix\" in the config or pass --matrix-file"))
    }
}
