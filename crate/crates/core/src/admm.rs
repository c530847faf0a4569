//! ADMM for the penalized center problem
//!
//! ```text
//! minimize  (1/2M) Σ_k ‖Σ − Σ̂_k‖_F² + λ Σ_{i≠j} |σ_ij|   subject to  Σ ⪰ νI
//! ```
//!
//! The problem is split as `Σ = Φ` with the eigenvalue floor carried by `Φ`
//! and the L1 penalty by `Σ`. One iteration is
//!
//! ```text
//! Φ ← (Σ + τΛ)₊
//! Σ ← s(τ(Σ̄ − Λ) + Φ, λτ) / (τ + 1)
//! Λ ← Λ − (Φ − Σ)/τ
//! ```
//!
//! where `(·)₊` floors eigenvalues at `ν` and `s` soft-thresholds the
//! off-diagonal entries. The whole thresholded matrix, diagonal included, is
//! divided by `τ + 1`.

use serde::{Deserialize, Serialize};

use crate::ensemble::{average_estimate, EnsembleEstimates};
use crate::error::{invalid, Error, Result};
use crate::linalg::{frobenius_dist, project_psd_floor, soft_threshold_offdiag, Cholesky, SymMatrix};
use crate::ZERO_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmmParams {
    /// Off-diagonal L1 penalty.
    pub lambda: f64,
    /// Augmented-Lagrangian penalty.
    pub tau: f64,
    /// Eigenvalue floor.
    pub nu: f64,
    /// Stop once `max(primal, step) ≤ tol · p`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AdmmParams {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            tau: 2.0,
            nu: 1e-4,
            tol: 1e-6,
            max_iter: 1000,
        }
    }
}

impl AdmmParams {
    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite();
        if !(self.lambda >= 0.0 && ok(self.lambda)) {
            return Err(invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.tau > 0.0 && ok(self.tau)) {
            return Err(invalid(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.nu > 0.0 && ok(self.nu)) {
            return Err(invalid(format!("nu must be > 0, got {}", self.nu)));
        }
        if !(self.tol > 0.0 && ok(self.tol)) {
            return Err(invalid(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Iterates `(Σ, Φ, Λ)` plus the residuals of the last step.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub sigma: SymMatrix,
    pub phi: SymMatrix,
    pub lambda_dual: SymMatrix,
    pub iter: usize,
    /// `‖Φ − Σ‖_F`.
    pub primal_residual: f64,
    /// `‖Σ_new − Σ_old‖_F`.
    pub step_residual: f64,
}

impl AdmmState {
    /// `Σ = Φ = Σ_init`, `Λ = 0`.
    pub fn new(sigma_init: &SymMatrix) -> Self {
        Self {
            sigma: sigma_init.clone(),
            phi: sigma_init.clone(),
            lambda_dual: SymMatrix::zeros(sigma_init.dim()),
            iter: 0,
            primal_residual: f64::INFINITY,
            step_residual: f64::INFINITY,
        }
    }

    pub fn residual(&self) -> f64 {
        self.primal_residual.max(self.step_residual)
    }
}

/// One pass of the three updates.
pub fn admm_step(state: &AdmmState, sigma_bar: &SymMatrix, params: &AdmmParams) -> Result<AdmmState> {
    let p = sigma_bar.dim();
    for m in [&state.sigma, &state.phi, &state.lambda_dual] {
        if m.dim() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: m.dim(),
            });
        }
    }
    let tau = params.tau;
    let phi = project_psd_floor(&(&state.sigma + &state.lambda_dual.scale(tau)), params.nu)?;
    let target = &(&(sigma_bar - &state.lambda_dual) * tau) + &phi;
    let sigma = soft_threshold_offdiag(&target, params.lambda * tau)?.scale(1.0 / (tau + 1.0));
    let gap = &phi - &sigma;
    let lambda_dual = &state.lambda_dual - &gap.scale(1.0 / tau);
    Ok(AdmmState {
        primal_residual: gap.frobenius_norm(),
        step_residual: frobenius_dist(&sigma, &state.sigma)?,
        sigma,
        phi,
        lambda_dual,
        iter: state.iter + 1,
    })
}

/// `(1/2M) Σ_k ‖Σ − Σ̂_k‖_F² + λ Σ_{i≠j} |σ_ij|`.
pub fn objective_value(sigma: &SymMatrix, estimates: &EnsembleEstimates, lambda: f64) -> Result<f64> {
    if sigma.dim() != estimates.dim() {
        return Err(Error::DimensionMismatch {
            expected: estimates.dim(),
            actual: sigma.dim(),
        });
    }
    let fit: f64 = estimates
        .estimates()
        .iter()
        .map(|e| frobenius_dist(sigma, e).map(|d| d * d))
        .sum::<Result<f64>>()?;
    let p = sigma.dim();
    let l1: f64 = (0..p)
        .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| sigma.get(i, j).abs())
        .sum();
    Ok(fit / (2.0 * estimates.len() as f64) + lambda * l1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub lambda: f64,
    /// `Σ` at exit after a final eigenvalue-floor projection.
    pub estimate: SymMatrix,
    /// `Σ` at exit before that projection; it carries the exact zeros.
    pub sparse: SymMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub final_primal_residual: f64,
    pub final_step_residual: f64,
    pub objective_value: f64,
    /// `max(primal, step)` after every iteration.
    pub residual_history: Vec<f64>,
    pub final_state: AdmmState,
}

impl SolveReport {
    /// Off-diagonal pairs `i < j` that are nonzero in the sparse iterate.
    pub fn offdiag_nonzeros(&self) -> usize {
        self.sparse.offdiag_nonzeros(ZERO_TOL)
    }
}

fn iterate(
    estimates: &EnsembleEstimates,
    sigma_bar: &SymMatrix,
    start: AdmmState,
    params: &AdmmParams,
) -> Result<SolveReport> {
    params.validate()?;
    let p = sigma_bar.dim();
    let threshold = params.tol * p as f64;
    let mut state = AdmmState { iter: 0, ..start };
    let mut history = Vec::new();
    let mut converged = false;
    while state.iter < params.max_iter {
        state = admm_step(&state, sigma_bar, params)?;
        history.push(state.residual());
        if state.residual() <= threshold {
            converged = true;
            break;
        }
    }
    let estimate = project_psd_floor(&state.sigma, params.nu)?;
    Ok(SolveReport {
        lambda: params.lambda,
        objective_value: objective_value(&estimate, estimates, params.lambda)?,
        estimate,
        sparse: state.sigma.clone(),
        iterations: state.iter,
        converged,
        final_primal_residual: state.primal_residual,
        final_step_residual: state.step_residual,
        residual_history: history,
        final_state: state,
    })
}

/// Runs ADMM from `Σ = Σ̄`, `Λ = 0`.
///
/// Running out of iterations is not an error; the report says `converged: false`.
pub fn solve(estimates: &EnsembleEstimates, params: &AdmmParams) -> Result<SolveReport> {
    let sigma_bar = average_estimate(estimates);
    iterate(estimates, &sigma_bar, AdmmState::new(&sigma_bar), params)
}

/// Like [`solve`] but starting from a previous solve's final state.
pub fn solve_warm(estimates: &EnsembleEstimates, start: &AdmmState, params: &AdmmParams) -> Result<SolveReport> {
    let sigma_bar = average_estimate(estimates);
    if start.sigma.dim() != sigma_bar.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma_bar.dim(),
            actual: start.sigma.dim(),
        });
    }
    iterate(estimates, &sigma_bar, start.clone(), params)
}

/// BIC with the nonzero count taken from `pattern` (pairs `i ≤ j`).
fn bic_with_pattern(estimate: &SymMatrix, pattern: &SymMatrix, s: &SymMatrix, n: usize) -> Result<f64> {
    if estimate.dim() != s.dim() || pattern.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            actual: estimate.dim(),
        });
    }
    if n == 0 {
        return Err(invalid("sample size must be positive"));
    }
    let chol = Cholesky::new(estimate).map_err(|_| Error::SingularEstimate)?;
    let inv = chol.inverse();
    let trace: f64 = inv.as_slice().iter().zip(s.as_slice()).map(|(a, b)| a * b).sum();
    let p = s.dim();
    let nonzero = p_upper_nonzeros(pattern, p);
    let nf = n as f64;
    Ok(chol.log_det() + trace + nf.ln() / nf * nonzero as f64)
}

fn p_upper_nonzeros(m: &SymMatrix, p: usize) -> usize {
    (0..p)
        .map(|i| (i..p).filter(|&j| m.get(i, j).abs() > ZERO_TOL).count())
        .sum()
}

/// `log|Σ̂| + tr(Σ̂⁻¹S) + (log n / n)·#{i ≤ j : σ̂_ij ≠ 0}`.
pub fn bic_score(estimate: &SymMatrix, s: &SymMatrix, n: usize) -> Result<f64> {
    bic_with_pattern(estimate, estimate, s, n)
}

/// Default `λ` path: `len` log-spaced values from the largest off-diagonal
/// magnitude of `Σ̄` down to `min_ratio` times it, followed by 0.
pub fn lambda_grid(sigma_bar: &SymMatrix, len: usize, min_ratio: f64) -> Vec<f64> {
    let max = sigma_bar.max_abs_offdiag();
    if max == 0.0 || len == 0 {
        return vec![0.0];
    }
    let mut grid = crate::mcd::log_grid(max, min_ratio, len);
    grid.push(0.0);
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub lambda: f64,
    pub bic: f64,
    pub offdiag_nonzeros: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSelection {
    pub lambda: f64,
    pub report: SolveReport,
    /// One entry per grid value, largest `λ` first.
    pub path: Vec<PathPoint>,
}

/// Solves along `grid` (largest `λ` first, each warm-started from the last)
/// and keeps the BIC minimizer; ties go to the larger `λ`. The nonzero count
/// in the BIC comes from the sparse iterate.
pub fn select_lambda(
    estimates: &EnsembleEstimates,
    s: &SymMatrix,
    n: usize,
    grid: &[f64],
    params: &AdmmParams,
) -> Result<LambdaSelection> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
        return Err(invalid("lambda grid must be non-negative and finite"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let sigma_bar = average_estimate(estimates);
    let mut state = AdmmState::new(&sigma_bar);
    let mut best: Option<(f64, SolveReport)> = None;
    let mut path = Vec::with_capacity(sorted.len());
    for &lambda in &sorted {
        let report = iterate(estimates, &sigma_bar, state, &params.with_lambda(lambda))?;
        let bic = bic_with_pattern(&report.estimate, &report.sparse, s, n)?;
        path.push(PathPoint {
            lambda,
            bic,
            offdiag_nonzeros: report.offdiag_nonzeros(),
            iterations: report.iterations,
            converged: report.converged,
        });
        state = report.final_state.clone();
        if best.as_ref().is_none_or(|(b, _)| bic < *b) {
            best = Some((bic, report));
        }
    }
    let (_, report) = best.expect("grid is non-empty");
    Ok(LambdaSelection {
        lambda: report.lambda,
        report,
        path,
    })
}
