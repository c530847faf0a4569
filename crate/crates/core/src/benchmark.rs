//! Replicate simulation study: draw data from a model, run each method,
//! score it against the truth, and summarize with mean and standard error.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{model_covariance, sample_mvn, ModelId, ModelSpec};
use crate::ensemble::Execution;
use crate::error::{invalid, Result};
use crate::estimator::{estimate, estimate_thresholded_sample, Estimate, EstimatorConfig};
use crate::linalg::{frobenius_dist, SymMatrix};
use crate::mcd::VarianceDenominator;
use crate::metrics::{evaluate_with_truth_tol, LossReport};

/// Bumped whenever the layout of [`BenchmarkResult`] changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// The `1/n` sample covariance.
    Sample,
    /// ADMM center problem on the sample covariance alone.
    Xmz,
    /// The permutation-ensemble estimator.
    Proposed,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Sample, Method::Xmz, Method::Proposed];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sample => "sample",
            Method::Xmz => "xmz",
            Method::Proposed => "proposed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub model: ModelId,
    pub p: usize,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Draw a fresh permutation for the permuted models in every replicate;
    /// otherwise one permutation (from `seed`) serves all replicates.
    pub permutation_per_replicate: bool,
    /// True entries with `|σ| ≤ fsl_truth_zero_tol` count as zeros in the
    /// FSL. Defaults to [`crate::ZERO_TOL`].
    pub fsl_truth_zero_tol: f64,
    pub estimator: EstimatorConfig,
}

impl BenchmarkConfig {
    pub fn new(model: ModelId, p: usize, n: usize, replicates: usize, seed: u64) -> Self {
        Self {
            model,
            p,
            n,
            replicates,
            seed,
            methods: Method::ALL.to_vec(),
            permutation_per_replicate: true,
            fsl_truth_zero_tol: crate::ZERO_TOL,
            estimator: EstimatorConfig::default(),
        }
    }
}

/// Seeds for one replicate, drawn from a ChaCha20 stream keyed on the run
/// seed and the replicate index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicateSeeds {
    pub model: u64,
    pub data: u64,
    pub orders: u64,
}

impl ReplicateSeeds {
    pub fn derive(seed: u64, replicate: usize) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(replicate as u64);
        Self {
            model: rng.next_u64(),
            data: rng.next_u64(),
            orders: rng.next_u64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub method: Method,
    pub losses: LossReport,
    /// `‖Σ̂ − Σ‖_F`.
    pub frobenius_error: f64,
    pub min_eigenvalue: f64,
    pub offdiag_nonzeros: usize,
    /// `None` for the sample covariance.
    pub lambda: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    /// Whether every solve along the `λ` path (including the chosen one)
    /// converged.
    pub path_converged: Option<bool>,
    pub final_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub metric: String,
    /// Replicates with a defined value.
    pub count: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation over `√count`.
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub schema_version: u32,
    pub config: BenchmarkConfig,
    pub records: Vec<ReplicateRecord>,
    pub summary: Vec<SummaryRow>,
}

struct Scoring<'a> {
    truth: &'a SymMatrix,
    truth_zero_tol: f64,
}

fn record_from(replicate: usize, method: Method, est: &SymMatrix, pattern: &SymMatrix, sc: &Scoring) -> Result<ReplicateRecord> {
    let truth = sc.truth;
    Ok(ReplicateRecord {
        replicate,
        method,
        losses: evaluate_with_truth_tol(est, pattern, truth, sc.truth_zero_tol)?,
        frobenius_error: frobenius_dist(est, truth)?,
        min_eigenvalue: est.min_eigenvalue()?,
        offdiag_nonzeros: pattern.offdiag_nonzeros(crate::ZERO_TOL),
        lambda: None,
        iterations: None,
        converged: None,
        path_converged: None,
        final_residual: None,
    })
}

fn record_from_estimate(replicate: usize, method: Method, e: &Estimate, sc: &Scoring) -> Result<ReplicateRecord> {
    let r = &e.report;
    Ok(ReplicateRecord {
        lambda: Some(e.lambda),
        iterations: Some(r.iterations),
        converged: Some(r.converged),
        path_converged: Some(r.converged && e.path.iter().all(|pt| pt.converged)),
        final_residual: Some(r.final_primal_residual.max(r.final_step_residual)),
        ..record_from(replicate, method, &r.estimate, &r.sparse, sc)?
    })
}

fn run_replicate(cfg: &BenchmarkConfig, replicate: usize, execution: Execution) -> Result<Vec<ReplicateRecord>> {
    let seeds = ReplicateSeeds::derive(cfg.seed, replicate);
    let model_seed = if cfg.permutation_per_replicate { seeds.model } else { cfg.seed };
    let truth = model_covariance(&ModelSpec::new(cfg.model, cfg.p, model_seed))?;
    let x = sample_mvn(&truth, cfg.n, seeds.data)?.center()?;
    let sc = Scoring {
        truth: &truth,
        truth_zero_tol: cfg.fsl_truth_zero_tol,
    };

    let mut out = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let rec = match method {
            Method::Sample => {
                let s = x.sample_covariance(VarianceDenominator::N);
                record_from(replicate, method, &s, &s, &sc)?
            }
            Method::Xmz => {
                let e = estimate_thresholded_sample(&x, &cfg.estimator.admm, cfg.estimator.lambda)?;
                record_from_estimate(replicate, method, &e, &sc)?
            }
            Method::Proposed => {
                let mut est_cfg = cfg.estimator.clone();
                est_cfg.ensemble.seed = seeds.orders;
                let e = estimate(&x, &est_cfg, execution)?;
                if !e.members_positive_definite {
                    return Err(invalid(format!("replicate {replicate}: an ensemble member is not positive definite")));
                }
                record_from_estimate(replicate, method, &e, &sc)?
            }
        };
        out.push(rec);
    }
    Ok(out)
}

fn mean_and_se(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let k = values.len();
    if k == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (Some(mean), Some((var / k as f64).sqrt()))
}

/// Metric names in summary order, with their extractors.
pub const METRICS: [&str; 6] = ["en", "ql", "l1", "mae", "fsl", "frobenius"];

fn metric_value(r: &ReplicateRecord, metric: &str) -> Option<f64> {
    match metric {
        "en" => r.losses.en,
        "ql" => r.losses.ql,
        "l1" => Some(r.losses.l1),
        "mae" => Some(r.losses.mae),
        "fsl" => Some(r.losses.fsl_percent),
        "frobenius" => Some(r.frobenius_error),
        _ => None,
    }
}

pub fn summarize(methods: &[Method], records: &[ReplicateRecord]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for &method in methods {
        for metric in METRICS {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method)
                .filter_map(|r| metric_value(r, metric))
                .collect();
            let (mean, std_error) = mean_and_se(&values);
            rows.push(SummaryRow {
                method,
                metric: metric.to_string(),
                count: values.len(),
                mean,
                std_error,
            });
        }
    }
    rows
}

/// Runs every replicate (in parallel on the current rayon pool) and gathers
/// records in replicate order.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkResult> {
    if cfg.replicates < 2 {
        return Err(invalid(format!("need at least 2 replicates, got {}", cfg.replicates)));
    }
    if cfg.n < 2 || cfg.p == 0 {
        return Err(invalid(format!("need n >= 2 and p >= 1, got n={} p={}", cfg.n, cfg.p)));
    }
    if !(cfg.fsl_truth_zero_tol >= 0.0 && cfg.fsl_truth_zero_tol.is_finite()) {
        return Err(invalid(format!("FSL truth tolerance must be finite and >= 0, got {}", cfg.fsl_truth_zero_tol)));
    }
    if cfg.methods.is_empty() {
        return Err(invalid("no methods selected"));
    }
    let per_replicate: Vec<Vec<ReplicateRecord>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| run_replicate(cfg, r, Execution::Parallel))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_>>()?;
    let records: Vec<ReplicateRecord> = per_replicate.into_iter().flatten().collect();
    Ok(BenchmarkResult {
        schema_version: SCHEMA_VERSION,
        summary: summarize(&cfg.methods, &records),
        config: cfg.clone(),
        records,
    })
}

impl BenchmarkResult {
    pub fn summary_for(&self, method: Method, metric: &str) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.method == method && r.metric == metric)
    }

    pub fn records_for(&self, method: Method) -> impl Iterator<Item = &ReplicateRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }
}
