use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use permcov::admm::AdmmParams;
use permcov::benchmark::Method;
use permcov::datagen::ModelId;
use permcov::ensemble::EnsembleConfig;
use permcov::estimator::{EstimatorConfig, LambdaChoice};
use permcov::mcd::{EtaPolicy, McdConfig, VarianceDenominator};

/// Sparse positive-definite covariance estimation from random-order
/// modified Cholesky ensembles.
///
/// Every option can also be set through a `PERMCOV_*` environment variable
/// (e.g. `PERMCOV_SEED`); explicit flags win.
#[derive(Debug, Parser)]
#[command(name = "permcov", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the covariance matrix of a CSV data file.
    Estimate(EstimateArgs),
    /// Draw a data set from one of the built-in models.
    Simulate(SimulateArgs),
    /// Run the replicate benchmark against a built-in model.
    Benchmark(BenchmarkArgs),
}

/// `auto` (BIC over the path) or a fixed non-negative value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaArg {
    Auto,
    Fixed(f64),
}

impl FromStr for LambdaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" | "bic" => Ok(Self::Auto),
            _ => match s.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.is_finite() => Ok(Self::Fixed(v)),
                _ => Err(format!("expected 'auto' or a non-negative number, got '{s}'")),
            },
        }
    }
}

/// `cv` (per-regression cross-validation) or a fixed non-negative value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaArg {
    Cv,
    Fixed(f64),
}

impl FromStr for EtaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cv" => Ok(Self::Cv),
            _ => match s.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.is_finite() => Ok(Self::Fixed(v)),
                _ => Err(format!("expected 'cv' or a non-negative number, got '{s}'")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ma,
    Ar,
    MaPerm,
    ArPerm,
}

impl From<ModelArg> for ModelId {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ma => ModelId::Ma,
            ModelArg::Ar => ModelId::Ar,
            ModelArg::MaPerm => ModelId::MaPerm,
            ModelArg::ArPerm => ModelId::ArPerm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Sample,
    Xmz,
    Proposed,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Sample => Method::Sample,
            MethodArg::Xmz => Method::Xmz,
            MethodArg::Proposed => Method::Proposed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenominatorArg {
    N,
    #[value(name = "n-1")]
    NMinusOne,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    /// Number of random variable orders.
    #[arg(long = "m-orders", env = "PERMCOV_M_ORDERS", default_value_t = 100)]
    pub m_orders: usize,

    #[arg(long, env = "PERMCOV_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Off-diagonal penalty: `auto` selects it by BIC.
    #[arg(long, env = "PERMCOV_LAMBDA", default_value = "auto")]
    pub lambda: LambdaArg,

    /// Points on the BIC path (log-spaced, plus zero).
    #[arg(long = "lambda-grid", env = "PERMCOV_LAMBDA_GRID", default_value_t = 20)]
    pub lambda_grid: usize,

    /// Smallest nonzero path value relative to the largest.
    #[arg(long = "lambda-ratio", env = "PERMCOV_LAMBDA_RATIO", default_value_t = 1e-3)]
    pub lambda_ratio: f64,

    /// ADMM augmented-Lagrangian parameter.
    #[arg(long, env = "PERMCOV_TAU", default_value_t = 2.0)]
    pub tau: f64,

    /// Eigenvalue floor of the estimate.
    #[arg(long, env = "PERMCOV_NU", default_value_t = 1e-4)]
    pub nu: f64,

    /// ADMM stops once both residuals are at most `tol · p`.
    #[arg(long, env = "PERMCOV_TOL", default_value_t = 1e-6)]
    pub tol: f64,

    #[arg(long = "max-iter", env = "PERMCOV_MAX_ITER", default_value_t = 1000)]
    pub max_iter: usize,

    /// Lasso penalty of the Cholesky regressions: `cv` or a fixed value.
    #[arg(long, env = "PERMCOV_ETA", default_value = "cv")]
    pub eta: EtaArg,

    #[arg(long = "cv-folds", env = "PERMCOV_CV_FOLDS", default_value_t = 5)]
    pub cv_folds: usize,

    #[arg(long = "eta-grid", env = "PERMCOV_ETA_GRID", default_value_t = 10)]
    pub eta_grid: usize,

    /// Divisor of the residual variances.
    #[arg(long, env = "PERMCOV_DENOMINATOR", value_enum, default_value_t = DenominatorArg::N)]
    pub denominator: DenominatorArg,

    /// Use the identity as the first order.
    #[arg(long = "include-identity", env = "PERMCOV_INCLUDE_IDENTITY")]
    pub include_identity: bool,

    /// Worker threads; 0 picks one per core.
    #[arg(long, env = "PERMCOV_WORKERS", default_value_t = 0)]
    pub workers: usize,
}

impl EstimatorArgs {
    pub fn admm(&self) -> AdmmParams {
        AdmmParams {
            lambda: 0.0,
            tau: self.tau,
            nu: self.nu,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub fn lambda_choice(&self) -> LambdaChoice {
        match self.lambda {
            LambdaArg::Auto => LambdaChoice::Bic {
                grid_len: self.lambda_grid,
                min_ratio: self.lambda_ratio,
            },
            LambdaArg::Fixed(v) => LambdaChoice::Fixed(v),
        }
    }

    pub fn config(&self) -> EstimatorConfig {
        EstimatorConfig {
            ensemble: EnsembleConfig {
                m: self.m_orders,
                seed: self.seed,
                include_identity: self.include_identity,
            },
            mcd: McdConfig {
                eta: match self.eta {
                    EtaArg::Cv => EtaPolicy::CrossValidated {
                        grid_len: self.eta_grid,
                        min_ratio: 1e-3,
                        folds: self.cv_folds,
                    },
                    EtaArg::Fixed(v) => EtaPolicy::Fixed(v),
                },
                denominator: match self.denominator {
                    DenominatorArg::N => VarianceDenominator::N,
                    DenominatorArg::NMinusOne => VarianceDenominator::NMinusOne,
                },
            },
            admm: self.admm(),
            lambda: self.lambda_choice(),
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Data CSV, one observation per row.
    #[arg(long, env = "PERMCOV_INPUT")]
    pub input: PathBuf,

    #[arg(long = "output-dir", env = "PERMCOV_OUTPUT_DIR")]
    pub output_dir: PathBuf,

    /// Rescale columns to unit variance and estimate the correlation matrix.
    #[arg(long, env = "PERMCOV_CORRELATION")]
    pub correlation: bool,

    /// Also write `heatmap.csv` with the absolute values of the estimate.
    #[arg(long, env = "PERMCOV_HEATMAP")]
    pub heatmap: bool,

    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, env = "PERMCOV_MODEL", value_enum)]
    pub model: ModelArg,

    #[arg(long, env = "PERMCOV_P")]
    pub p: usize,

    #[arg(long, env = "PERMCOV_N")]
    pub n: usize,

    #[arg(long, env = "PERMCOV_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long = "output-dir", env = "PERMCOV_OUTPUT_DIR")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long, env = "PERMCOV_MODEL", value_enum)]
    pub model: ModelArg,

    #[arg(long, env = "PERMCOV_P")]
    pub p: usize,

    #[arg(long, env = "PERMCOV_N")]
    pub n: usize,

    #[arg(long, env = "PERMCOV_REPLICATES", default_value_t = 100)]
    pub replicates: usize,

    /// Methods to run, comma separated.
    #[arg(
        long,
        env = "PERMCOV_METHODS",
        value_enum,
        value_delimiter = ',',
        default_values_t = [MethodArg::Sample, MethodArg::Xmz, MethodArg::Proposed]
    )]
    pub methods: Vec<MethodArg>,

    /// Use one model permutation for all replicates instead of a fresh one each.
    #[arg(long = "shared-permutation", env = "PERMCOV_SHARED_PERMUTATION")]
    pub shared_permutation: bool,

    /// True entries at or below this magnitude count as zeros in the FSL.
    #[arg(long = "fsl-truth-tol", env = "PERMCOV_FSL_TRUTH_TOL", default_value_t = permcov::ZERO_TOL)]
    pub fsl_truth_tol: f64,

    #[arg(long = "output-dir", env = "PERMCOV_OUTPUT_DIR")]
    pub output_dir: PathBuf,

    #[command(flatten)]
    pub estimator: EstimatorArgs,
}
