//! Sparse, positive-definite covariance estimation by ensembling modified
//! Cholesky estimates over random variable orders.
//!
//! For each of `M` random orders the variables are regressed, in order, on the
//! residuals of their predecessors with a lasso penalty. This yields an
//! order-dependent estimate `L D Lᵀ`, which is mapped back to the original
//! variable order. The final estimate is the penalized "center" of the `M`
//! estimates: the closest matrix (in mean squared Frobenius distance) with an
//! L1 penalty on its off-diagonal entries and eigenvalues at least `ν`,
//! computed by ADMM with `λ` chosen by BIC.
//!
//! ```no_run
//! use permcov::{datagen, ensemble::Execution, estimator};
//!
//! let truth = datagen::model_covariance(&datagen::ModelSpec::new(datagen::ModelId::Ma, 30, 0))?;
//! let x = datagen::sample_mvn(&truth, 50, 1)?.center()?;
//! let est = estimator::estimate(&x, &estimator::EstimatorConfig::default(), Execution::Parallel)?;
//! println!("lambda = {}, converged = {}", est.lambda, est.report.converged);
//! # Ok::<(), permcov::Error>(())
//! ```

pub mod admm;
pub mod benchmark;
pub mod datagen;
pub mod ensemble;
pub mod error;
pub mod estimator;
pub mod linalg;
pub mod mcd;
pub mod metrics;

pub use error::{Error, Result};
pub use linalg::{Permutation, SymMatrix};

/// Entries with `|v| ≤ ZERO_TOL` count as zero in the BIC and FSL.
pub const ZERO_TOL: f64 = 1e-12;
