use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use permcov::admm::PathPoint;
use permcov::benchmark::{run_benchmark, BenchmarkConfig, BenchmarkResult};
use permcov::datagen::{model_covariance, sample_mvn, ModelId, ModelSpec};
use permcov::ensemble::Execution;
use permcov::estimator::{estimate, EstimatorConfig};
use permcov::SymMatrix;

use crate::args::{BenchmarkArgs, EstimateArgs, SimulateArgs};
use crate::csvio::{data_csv, matrix_csv, read_table};
use crate::error::{CliError, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Files are only written once every output has been computed, so a failed
/// run leaves nothing behind.
struct Outputs {
    dir: PathBuf,
    files: Vec<(&'static str, String)>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: &'static str, contents: String) {
        self.files.push((name, contents));
    }

    fn commit(self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|source| CliError::Write {
            path: self.dir.clone(),
            source,
        })?;
        for (name, contents) in self.files {
            let path = self.dir.join(name);
            std::fs::write(&path, contents).map_err(|source| CliError::Write { path, source })?;
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

#[derive(Debug, Serialize)]
struct EstimateReport<'a> {
    schema_version: u32,
    input: String,
    n: usize,
    p: usize,
    variables: Option<&'a [String]>,
    correlation: bool,
    lambda: f64,
    lambda_selection: &'static str,
    iterations: usize,
    converged: bool,
    primal_residual: f64,
    step_residual: f64,
    objective_value: f64,
    offdiag_nonzeros: usize,
    min_eigenvalue: f64,
    members_positive_definite: bool,
    path: &'a [PathPoint],
    config: &'a EstimatorConfig,
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let table = read_table(&args.input)?;
    let centered = table
        .data
        .center()
        .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
    let x = if args.correlation { centered.standardized() } else { centered };
    let cfg = args.estimator.config();
    let est = pool(args.estimator.workers)?.install(|| estimate(&x, &cfg, Execution::Parallel))?;
    let r = &est.report;
    if !r.converged {
        log::warn!(
            "ADMM stopped after {} iterations without converging (residuals {:.3e}, {:.3e})",
            r.iterations,
            r.final_primal_residual,
            r.final_step_residual
        );
    }
    let report = EstimateReport {
        schema_version: REPORT_SCHEMA_VERSION,
        input: args.input.display().to_string(),
        n: x.n(),
        p: x.p(),
        variables: table.header.as_deref(),
        correlation: args.correlation,
        lambda: est.lambda,
        lambda_selection: if est.path.is_empty() { "fixed" } else { "bic" },
        iterations: r.iterations,
        converged: r.converged,
        primal_residual: r.final_primal_residual,
        step_residual: r.final_step_residual,
        objective_value: r.objective_value,
        offdiag_nonzeros: r.offdiag_nonzeros(),
        min_eigenvalue: r.estimate.min_eigenvalue()?,
        members_positive_definite: est.members_positive_definite,
        path: &est.path,
        config: &cfg,
    };
    let mut out = Outputs::new(&args.output_dir);
    out.add("estimate.csv", matrix_csv(&r.estimate));
    out.add("report.json", to_json(&report));
    if args.heatmap {
        out.add("heatmap.csv", matrix_csv(&r.estimate.map(f64::abs)));
    }
    out.commit()
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    if args.n == 0 || args.p == 0 {
        return Err(CliError::input(format!("need n >= 1 and p >= 1, got n={} p={}", args.n, args.p)));
    }
    let model: ModelId = args.model.into();
    let truth: SymMatrix = model_covariance(&ModelSpec::new(model, args.p, args.seed))?;
    // Separate streams for the model permutation and the draws.
    let data = sample_mvn(&truth, args.n, args.seed.wrapping_add(1))?;
    let names: Vec<String> = (1..=args.p).map(|j| format!("x{j}")).collect();
    let mut out = Outputs::new(&args.output_dir);
    out.add("data.csv", data_csv(&data, &names));
    out.add("truth.csv", matrix_csv(&truth));
    out.commit()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_csv(res: &BenchmarkResult) -> String {
    let mut s = String::from("method,metric,count,mean,std_error\n");
    for row in &res.summary {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            row.method.as_str(),
            row.metric,
            row.count,
            fmt_opt(row.mean),
            fmt_opt(row.std_error)
        );
    }
    s
}

pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let mut cfg = BenchmarkConfig::new(args.model.into(), args.p, args.n, args.replicates, args.estimator.seed);
    cfg.methods.clear();
    for &m in &args.methods {
        if !cfg.methods.contains(&m.into()) {
            cfg.methods.push(m.into());
        }
    }
    cfg.permutation_per_replicate = !args.shared_permutation;
    cfg.fsl_truth_zero_tol = args.fsl_truth_tol;
    cfg.estimator = args.estimator.config();
    let res = pool(args.estimator.workers)?.install(|| run_benchmark(&cfg))?;
    let failed = res.records.iter().filter(|r| r.converged == Some(false)).count();
    if failed > 0 {
        log::warn!("{failed} solves did not converge");
    }
    let mut out = Outputs::new(&args.output_dir);
    out.add("benchmark.json", to_json(&res));
    out.add("summary.csv", summary_csv(&res));
    out.commit()
}
