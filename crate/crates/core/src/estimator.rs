//! End-to-end estimator: orders → per-order MCD → average → ADMM center.

use serde::{Deserialize, Serialize};

use crate::admm::{lambda_grid, select_lambda, solve, AdmmParams, PathPoint, SolveReport};
use crate::ensemble::{average_estimate, ensemble_estimates, generate_orders, EnsembleConfig, EnsembleEstimates, Execution};
use crate::error::{invalid, Result};
use crate::linalg::{Cholesky, SymMatrix};
use crate::mcd::{CenteredData, McdConfig, VarianceDenominator};

/// How the sparsity penalty is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaChoice {
    Fixed(f64),
    /// BIC over [`lambda_grid`]`(Σ̄, grid_len, min_ratio)`.
    Bic { grid_len: usize, min_ratio: f64 },
}

impl Default for LambdaChoice {
    fn default() -> Self {
        Self::Bic {
            grid_len: 20,
            min_ratio: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub ensemble: EnsembleConfig,
    pub mcd: McdConfig,
    /// `lambda` here is ignored; see [`EstimatorConfig::lambda`].
    pub admm: AdmmParams,
    pub lambda: LambdaChoice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub lambda: f64,
    pub report: SolveReport,
    /// Empty when `λ` was fixed.
    pub path: Vec<PathPoint>,
    pub sigma_bar: SymMatrix,
    /// Whether every ensemble member admitted a Cholesky factorization.
    pub members_positive_definite: bool,
}

/// Solves the center problem for `estimates` with `λ` chosen per `choice`.
/// `s` is the `1/n` sample covariance used by the BIC.
pub fn solve_center(
    estimates: &EnsembleEstimates,
    s: &SymMatrix,
    n: usize,
    admm: &AdmmParams,
    choice: LambdaChoice,
) -> Result<Estimate> {
    let sigma_bar = average_estimate(estimates);
    let members_positive_definite = estimates.estimates().iter().all(|m| Cholesky::new(m).is_ok());
    let (lambda, report, path) = match choice {
        LambdaChoice::Fixed(lambda) => {
            let report = solve(estimates, &admm.with_lambda(lambda))?;
            (lambda, report, Vec::new())
        }
        LambdaChoice::Bic { grid_len, min_ratio } => {
            if !(min_ratio > 0.0 && min_ratio <= 1.0) {
                return Err(invalid(format!("lambda grid ratio must lie in (0, 1], got {min_ratio}")));
            }
            let grid = lambda_grid(&sigma_bar, grid_len, min_ratio);
            let sel = select_lambda(estimates, s, n, &grid, admm)?;
            (sel.lambda, sel.report, sel.path)
        }
    };
    Ok(Estimate {
        lambda,
        report,
        path,
        sigma_bar,
        members_positive_definite,
    })
}

/// The permutation-ensemble estimator.
pub fn estimate(x: &CenteredData, cfg: &EstimatorConfig, execution: Execution) -> Result<Estimate> {
    let orders = generate_orders(x.p(), &cfg.ensemble)?;
    let members = ensemble_estimates(x, &orders, &cfg.mcd, execution)?;
    let s = x.sample_covariance(VarianceDenominator::N);
    solve_center(&members, &s, x.n(), &cfg.admm, cfg.lambda)
}

/// Baseline: the same center problem with the sample covariance as the only
/// member, i.e. soft thresholding of `S` under the eigenvalue floor.
pub fn estimate_thresholded_sample(x: &CenteredData, admm: &AdmmParams, choice: LambdaChoice) -> Result<Estimate> {
    let s = x.sample_covariance(VarianceDenominator::N);
    solve_center(&EnsembleEstimates::single(s.clone()), &s, x.n(), admm, choice)
}
