//! Losses between an estimate `Σ̂` and the true covariance `Σ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, SymMatrix};
use crate::ZERO_TOL;

fn same_dim(est: &SymMatrix, truth: &SymMatrix) -> Result<()> {
    if est.dim() != truth.dim() {
        return Err(Error::DimensionMismatch {
            expected: truth.dim(),
            actual: est.dim(),
        });
    }
    Ok(())
}

/// `tr(Σ⁻¹Σ̂) − log|Σ⁻¹Σ̂| − p`.
pub fn entropy_loss(est: &SymMatrix, truth: &SymMatrix) -> Result<f64> {
    same_dim(est, truth)?;
    let est_chol = Cholesky::new(est).map_err(|_| Error::SingularEstimate)?;
    let truth_chol = Cholesky::new(truth)?;
    let p = truth.dim();
    let prod = truth_chol.solve_matrix(est);
    let trace: f64 = (0..p).map(|i| prod[i * p + i]).sum();
    Ok(trace - (est_chol.log_det() - truth_chol.log_det()) - p as f64)
}

/// `(1/p) tr[(Σ̂⁻¹Σ − I)²]`.
pub fn quadratic_loss(est: &SymMatrix, truth: &SymMatrix) -> Result<f64> {
    same_dim(est, truth)?;
    let chol = Cholesky::new(est).map_err(|_| Error::SingularEstimate)?;
    let p = truth.dim();
    let mut a = chol.solve_matrix(truth);
    for i in 0..p {
        a[i * p + i] -= 1.0;
    }
    let tr: f64 = (0..p)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .map(|(i, j)| a[i * p + j] * a[j * p + i])
        .sum();
    Ok(tr / p as f64)
}

/// Largest absolute column sum of `Σ̂ − Σ`.
pub fn l1_norm_diff(est: &SymMatrix, truth: &SymMatrix) -> Result<f64> {
    same_dim(est, truth)?;
    let p = truth.dim();
    Ok((0..p)
        .map(|j| (0..p).map(|i| (est.get(i, j) - truth.get(i, j)).abs()).sum::<f64>())
        .fold(0.0, f64::max))
}

/// `(1/p) Σ_ij |σ̂_ij − σ_ij|`. The divisor is `p`, not `p²`.
pub fn mae(est: &SymMatrix, truth: &SymMatrix) -> Result<f64> {
    same_dim(est, truth)?;
    let total: f64 = est
        .as_slice()
        .iter()
        .zip(truth.as_slice())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(total / truth.dim() as f64)
}

/// Misclassified zero/nonzero entries as a percentage of all `p²` entries.
///
/// A false positive is a nonzero true entry estimated as zero, a false
/// negative a zero true entry estimated as nonzero. An entry counts as zero
/// when `|v| ≤ zero_tol`.
pub fn fsl(est: &SymMatrix, truth: &SymMatrix, zero_tol: f64) -> Result<f64> {
    fsl_split_tol(est, truth, zero_tol, zero_tol)
}

/// [`fsl`] with separate zero tolerances for the estimate and the truth.
/// A truth tolerance around `1e-3` treats the far tail of a geometrically
/// decaying model (e.g. `0.5^k`, `k ≥ 10`) as structural zeros.
pub fn fsl_split_tol(est: &SymMatrix, truth: &SymMatrix, est_zero_tol: f64, truth_zero_tol: f64) -> Result<f64> {
    same_dim(est, truth)?;
    let p = truth.dim();
    let (mut fp, mut fn_) = (0usize, 0usize);
    for (e, t) in est.as_slice().iter().zip(truth.as_slice()) {
        let est_zero = e.abs() <= est_zero_tol;
        let true_zero = t.abs() <= truth_zero_tol;
        match (true_zero, est_zero) {
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            _ => {}
        }
    }
    Ok(100.0 * (fp + fn_) as f64 / (p * p) as f64)
}

/// All five losses. `en` and `ql` are `None` when the estimate is singular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub en: Option<f64>,
    pub ql: Option<f64>,
    pub l1: f64,
    pub mae: f64,
    pub fsl_percent: f64,
}

fn singular_to_none(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::SingularEstimate) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Evaluates `est` against `truth`, reading the zero pattern for FSL from
/// `pattern` (pass `est` itself when it carries its own zeros).
pub fn evaluate(est: &SymMatrix, pattern: &SymMatrix, truth: &SymMatrix) -> Result<LossReport> {
    evaluate_with_truth_tol(est, pattern, truth, ZERO_TOL)
}

/// [`evaluate`] with a separate zero tolerance for the truth in the FSL.
pub fn evaluate_with_truth_tol(est: &SymMatrix, pattern: &SymMatrix, truth: &SymMatrix, truth_zero_tol: f64) -> Result<LossReport> {
    same_dim(pattern, truth)?;
    Ok(LossReport {
        en: singular_to_none(entropy_loss(est, truth))?,
        ql: singular_to_none(quadratic_loss(est, truth))?,
        l1: l1_norm_diff(est, truth)?,
        mae: mae(est, truth)?,
        fsl_percent: fsl_split_tol(pattern, truth, ZERO_TOL, truth_zero_tol)?,
    })
}
