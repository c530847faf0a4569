//! Random variable orders, per-order MCD estimates and their average.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{Permutation, SymMatrix};
use crate::mcd::{estimate_for_order, CenteredData, McdConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Number of orders `M`.
    pub m: usize,
    pub seed: u64,
    /// Make the first order the identity.
    pub include_identity: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            m: 100,
            seed: 0,
            include_identity: false,
        }
    }
}

/// `M` permutations of `0..p`. Order `k` is shuffled by a ChaCha20 stream
/// keyed on `(seed, k)`, so each order can be regenerated on its own.
pub fn generate_orders(p: usize, cfg: &EnsembleConfig) -> Result<Vec<Permutation>> {
    if cfg.m == 0 {
        return Err(invalid("number of orders must be at least 1"));
    }
    if p == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    Ok((0..cfg.m)
        .map(|k| {
            if k == 0 && cfg.include_identity {
                return Permutation::identity(p);
            }
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            Permutation::random(p, &mut rng)
        })
        .collect())
}

/// Per-order estimates, each already in the original variable order.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEstimates {
    estimates: Vec<SymMatrix>,
    orders: Vec<Permutation>,
}

impl EnsembleEstimates {
    pub fn new(estimates: Vec<SymMatrix>, orders: Vec<Permutation>) -> Result<Self> {
        if estimates.is_empty() {
            return Err(invalid("ensemble must contain at least one estimate"));
        }
        if estimates.len() != orders.len() {
            return Err(Error::DimensionMismatch {
                expected: estimates.len(),
                actual: orders.len(),
            });
        }
        let p = estimates[0].dim();
        for m in &estimates {
            if m.dim() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: m.dim(),
                });
            }
        }
        for o in &orders {
            if o.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: o.len(),
                });
            }
        }
        Ok(Self { estimates, orders })
    }

    /// A one-member "ensemble" holding an arbitrary matrix, e.g. the sample
    /// covariance when the center problem is solved on `S` alone.
    pub fn single(estimate: SymMatrix) -> Self {
        let p = estimate.dim();
        Self {
            estimates: vec![estimate],
            orders: vec![Permutation::identity(p)],
        }
    }

    pub fn dim(&self) -> usize {
        self.estimates[0].dim()
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn estimates(&self) -> &[SymMatrix] {
        &self.estimates
    }

    pub fn orders(&self) -> &[Permutation] {
        &self.orders
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Runs [`estimate_for_order`] for every order.
///
/// Each order only reads shared data, so serial and parallel execution give
/// identical results. The first failing order (by index) is reported.
pub fn ensemble_estimates(
    x: &CenteredData,
    orders: &[Permutation],
    cfg: &McdConfig,
    execution: Execution,
) -> Result<EnsembleEstimates> {
    if orders.is_empty() {
        return Err(invalid("at least one order is required"));
    }
    let run = |(index, order): (usize, &Permutation)| {
        estimate_for_order(x, order, cfg).map_err(|e| Error::OrderFailed {
            index,
            source: Box::new(e),
        })
    };
    let estimates = match execution {
        Execution::Serial => orders.iter().enumerate().map(run).collect::<Result<Vec<_>>>()?,
        Execution::Parallel => orders.par_iter().enumerate().map(run).collect::<Vec<_>>().into_iter().collect::<Result<Vec<_>>>()?,
    };
    EnsembleEstimates::new(estimates, orders.to_vec())
}

/// Elementwise mean `Σ̄` of the ensemble.
pub fn average_estimate(e: &EnsembleEstimates) -> SymMatrix {
    let p = e.dim();
    let m = e.len() as f64;
    let mut sum = vec![0.0; p * p];
    for est in e.estimates() {
        for (s, v) in sum.iter_mut().zip(est.as_slice()) {
            *s += v;
        }
    }
    SymMatrix::from_symmetric_unchecked(p, sum.into_iter().map(|s| s / m).collect())
}
