//! True covariance models and seeded Gaussian samples.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{permute_sym, Cholesky, Permutation, SymMatrix};
use crate::mcd::DataMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    /// MA(0.5, 0.3): unit diagonal, 0.5 on the first and 0.3 on the second
    /// sub-diagonal.
    Ma,
    /// AR(0.5): `σ_ij = 0.5^|i−j|`.
    Ar,
    /// `Ma` under a random symmetric row/column permutation.
    MaPerm,
    /// `Ar` under a random symmetric row/column permutation.
    ArPerm,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [ModelId::Ma, ModelId::Ar, ModelId::MaPerm, ModelId::ArPerm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Ma => "ma",
            ModelId::Ar => "ar",
            ModelId::MaPerm => "ma-perm",
            ModelId::ArPerm => "ar-perm",
        }
    }

    pub fn is_permuted(self) -> bool {
        matches!(self, ModelId::MaPerm | ModelId::ArPerm)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown model '{s}' (expected ma, ar, ma-perm or ar-perm)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: ModelId,
    pub p: usize,
    /// Seeds the permutation of the permuted variants; ignored otherwise.
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(model: ModelId, p: usize, seed: u64) -> Self {
        Self { model, p, seed }
    }

    /// The permutation applied by the permuted variants.
    pub fn permutation(&self) -> Permutation {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        Permutation::random(self.p, &mut rng)
    }
}

fn moving_average(p: usize) -> SymMatrix {
    SymMatrix::from_fn(p, |i, j| match j.abs_diff(i) {
        0 => 1.0,
        1 => 0.5,
        2 => 0.3,
        _ => 0.0,
    })
}

fn autoregressive(p: usize) -> SymMatrix {
    SymMatrix::from_fn(p, |i, j| 0.5f64.powi(j.abs_diff(i) as i32))
}

pub fn model_covariance(spec: &ModelSpec) -> Result<SymMatrix> {
    if spec.p == 0 {
        return Err(invalid("model dimension must be at least 1"));
    }
    let base = match spec.model {
        ModelId::Ma | ModelId::MaPerm => moving_average(spec.p),
        ModelId::Ar | ModelId::ArPerm => autoregressive(spec.p),
    };
    if spec.model.is_permuted() {
        permute_sym(&base, &spec.permutation())
    } else {
        Ok(base)
    }
}

/// `n` draws from `N(0, sigma)` as `G z` with `G Gᵀ = sigma` and `z` standard
/// normal (ChaCha20 stream, ziggurat normals). Rows are observations; the
/// result is not centered.
pub fn sample_mvn(sigma: &SymMatrix, n: usize, seed: u64) -> Result<DataMatrix> {
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let chol = Cholesky::new(sigma)?;
    let g = chol.lower();
    let p = sigma.dim();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n * p);
    let mut z = vec![0.0; p];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        for i in 0..p {
            values.push((0..=i).map(|k| g[i * p + k] * z[k]).sum());
        }
    }
    DataMatrix::new(n, p, values)
}
