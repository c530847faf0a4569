//! Modified Cholesky factors fitted by sequential lasso regressions.
//!
//! Under a fixed variable order, variable `j` is regressed on the residuals of
//! variables `0..j`; the coefficients fill row `j` of a unit lower-triangular
//! `L` and the residual variance gives `d_j²`, so that `Σ̂ = L D Lᵀ`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{permute_sym, soft_threshold, Permutation, SymMatrix};

/// Smallest residual variance kept in `D`.
pub const RESIDUAL_VARIANCE_FLOOR: f64 = 1e-12;

const LASSO_TOL: f64 = 1e-9;
const LASSO_MAX_PASSES: usize = 10_000;

/// Observations in rows, variables in columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(invalid(format!("data matrix must be non-empty, got {n}x{p}")));
        }
        if values.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                actual: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("data matrix"));
        }
        Ok(Self { n, p, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * p);
        for row in rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), p, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// Subtracts column means. Needs at least two observations.
    pub fn center(&self) -> Result<CenteredData> {
        if self.n < 2 {
            return Err(invalid(format!("need at least 2 observations, got {}", self.n)));
        }
        let columns = (0..self.p)
            .map(|j| {
                let col = self.column(j);
                let mean = col.iter().sum::<f64>() / self.n as f64;
                col.into_iter().map(|v| v - mean).collect()
            })
            .collect();
        Ok(CenteredData { n: self.n, columns })
    }
}

/// Column-centered data, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredData {
    n: usize,
    columns: Vec<Vec<f64>>,
}

impl CenteredData {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    /// Columns rearranged so position `k` holds variable `order.forward()[k]`.
    pub fn reorder(&self, order: &Permutation) -> Result<Self> {
        if order.len() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                actual: order.len(),
            });
        }
        Ok(Self {
            n: self.n,
            columns: order.forward().iter().map(|&v| self.columns[v].clone()).collect(),
        })
    }

    /// Rescales each column to unit `1/n` variance, so the sample covariance
    /// becomes the sample correlation matrix. Constant columns are left at zero.
    pub fn standardized(&self) -> Self {
        let n = self.n as f64;
        let columns = self
            .columns
            .iter()
            .map(|c| {
                let sd = (c.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
                if sd > 0.0 {
                    c.iter().map(|v| v / sd).collect()
                } else {
                    c.clone()
                }
            })
            .collect();
        Self { n: self.n, columns }
    }

    pub fn sample_covariance(&self, denominator: VarianceDenominator) -> SymMatrix {
        let d = denominator.divisor(self.n);
        SymMatrix::from_fn(self.p(), |i, j| dot(&self.columns[i], &self.columns[j]) / d)
    }
}

/// Divisor used for residual variances and sample covariances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceDenominator {
    /// `1/n`, the maximum-likelihood scaling.
    #[default]
    N,
    /// `1/(n−1)`.
    NMinusOne,
}

impl VarianceDenominator {
    pub fn divisor(self, n: usize) -> f64 {
        match self {
            Self::N => n as f64,
            Self::NMinusOne => (n - 1) as f64,
        }
    }
}

/// How the lasso penalty `η_j` of each regression is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaPolicy {
    /// The same `η` for every regression.
    Fixed(f64),
    /// K-fold CV over a log-spaced grid from `η_max(j) = 2·max|Zᵀx|` down to
    /// `min_ratio·η_max(j)`, chosen separately for every regression.
    CrossValidated {
        grid_len: usize,
        min_ratio: f64,
        folds: usize,
    },
}

impl Default for EtaPolicy {
    fn default() -> Self {
        Self::CrossValidated {
            grid_len: 10,
            min_ratio: 1e-3,
            folds: 5,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct McdConfig {
    pub eta: EtaPolicy,
    pub denominator: VarianceDenominator,
}

impl McdConfig {
    pub fn fixed_eta(eta: f64) -> Self {
        Self {
            eta: EtaPolicy::Fixed(eta),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.eta {
            EtaPolicy::Fixed(eta) if !(eta >= 0.0 && eta.is_finite()) => {
                Err(invalid(format!("eta must be a non-negative number, got {eta}")))
            }
            EtaPolicy::CrossValidated {
                grid_len,
                min_ratio,
                folds,
            } if grid_len == 0 || folds < 2 || !(min_ratio > 0.0 && min_ratio <= 1.0) => Err(invalid(
                format!("bad CV policy: grid_len={grid_len}, min_ratio={min_ratio}, folds={folds}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Unit lower-triangular `L` and the diagonal of `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactors {
    dim: usize,
    lower: Vec<f64>,
    d2: Vec<f64>,
}

impl CholeskyFactors {
    pub fn new(dim: usize, lower: Vec<f64>, d2: Vec<f64>) -> Result<Self> {
        if dim == 0 || lower.len() != dim * dim || d2.len() != dim {
            return Err(invalid("factor dimensions do not match"));
        }
        for j in 0..dim {
            if lower[j * dim + j] != 1.0 || lower[j * dim + j + 1..(j + 1) * dim].iter().any(|&v| v != 0.0) {
                return Err(invalid(format!("row {j} of L is not unit lower-triangular")));
            }
        }
        if !lower.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("Cholesky factor"));
        }
        if !d2.iter().all(|&d| d > 0.0 && d.is_finite()) {
            return Err(invalid("residual variances must be positive"));
        }
        Ok(Self { dim, lower, d2 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    /// Row-major `L`.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn d2(&self) -> &[f64] {
        &self.d2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McdFit {
    pub factors: CholeskyFactors,
    /// `e^{(j)}` for every position of the order; `residuals[0]` is the first column.
    pub residuals: Vec<Vec<f64>>,
    /// Positions whose residual variance was floored.
    pub degenerate: Vec<usize>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coordinate descent for `‖y − Zl‖² + η‖l‖₁` given `G = ZᵀZ` (row-major
/// `k × k`) and `Zᵀy`. `coef` is the warm start and receives the result.
fn lasso_gram(gram: &[f64], zty: &[f64], eta: f64, coef: &mut [f64]) {
    let k = zty.len();
    let scale = (0..k).map(|c| gram[c * k + c]).fold(0.0_f64, f64::max);
    let dead = |c: usize| gram[c * k + c] <= 1e-24 * scale || gram[c * k + c] == 0.0;

    // grad[c] = z_cᵀ(y − Z l)
    let mut grad: Vec<f64> = zty.to_vec();
    for c in 0..k {
        if coef[c] != 0.0 {
            if dead(c) {
                coef[c] = 0.0;
                continue;
            }
            for m in 0..k {
                grad[m] -= gram[m * k + c] * coef[c];
            }
        }
    }

    let half_eta = 0.5 * eta;
    for _ in 0..LASSO_MAX_PASSES {
        let mut max_change = 0.0_f64;
        for c in 0..k {
            if dead(c) {
                continue;
            }
            let gcc = gram[c * k + c];
            let rho = grad[c] + gcc * coef[c];
            let new = soft_threshold(rho, half_eta) / gcc;
            let delta = new - coef[c];
            if delta != 0.0 {
                for m in 0..k {
                    grad[m] -= gram[m * k + c] * delta;
                }
                coef[c] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change <= LASSO_TOL {
            return;
        }
    }
    warn!("lasso coordinate descent hit {LASSO_MAX_PASSES} passes");
}

fn gram_of(columns: &[&[f64]], rows: impl Iterator<Item = usize> + Clone) -> Vec<f64> {
    let k = columns.len();
    let mut g = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let v: f64 = rows.clone().map(|i| columns[a][i] * columns[b][i]).sum();
            g[a * k + b] = v;
            g[b * k + a] = v;
        }
    }
    g
}

fn cross_of(columns: &[&[f64]], y: &[f64], rows: impl Iterator<Item = usize> + Clone) -> Vec<f64> {
    columns
        .iter()
        .map(|c| rows.clone().map(|i| c[i] * y[i]).sum())
        .collect()
}

fn check_design(y: &[f64], z: &[&[f64]]) -> Result<()> {
    if y.is_empty() {
        return Err(invalid("regression needs at least one observation"));
    }
    for col in z {
        if col.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: y.len(),
                actual: col.len(),
            });
        }
    }
    if !y.iter().chain(z.iter().flat_map(|c| c.iter())).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("regression data"));
    }
    Ok(())
}

/// Minimizes `‖y − Z l‖₂² + η‖l‖₁` (no ½, no 1/n) over `l`.
///
/// `z` holds the columns of `Z`. Columns with zero variance get coefficient 0.
pub fn lasso_regress(y: &[f64], z: &[&[f64]], eta: f64) -> Result<Vec<f64>> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(invalid(format!("eta must be a non-negative number, got {eta}")));
    }
    check_design(y, z)?;
    let rows = 0..y.len();
    let gram = gram_of(z, rows.clone());
    let zty = cross_of(z, y, rows);
    let mut coef = vec![0.0; z.len()];
    lasso_gram(&gram, &zty, eta, &mut coef);
    Ok(coef)
}

/// Outcome of [`select_eta_cv`].
#[derive(Debug, Clone, PartialEq)]
pub struct CvSelection {
    pub eta: f64,
    /// Mean held-out squared error per grid entry, in grid order.
    pub errors: Vec<f64>,
}

/// Contiguous fold boundaries: fold `f` covers `[f·n/k, (f+1)·n/k)`.
fn fold_bounds(n: usize, folds: usize) -> Vec<(usize, usize)> {
    (0..folds).map(|f| (f * n / folds, (f + 1) * n / folds)).collect()
}

/// Picks `η` from `grid` by contiguous-block cross validation.
///
/// The CV error of a grid value is the average over folds of the held-out
/// mean squared prediction error. Ties go to the larger `η`.
pub fn select_eta_cv(y: &[f64], z: &[&[f64]], grid: &[f64], folds: usize) -> Result<CvSelection> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
        return Err(invalid("eta grid must be non-negative and finite"));
    }
    check_design(y, z)?;
    let n = y.len();
    if folds < 2 || folds > n {
        return Err(invalid(format!("folds must lie in 2..={n}, got {folds}")));
    }

    // Solve larger penalties first so each fit warm-starts the next.
    let mut by_eta: Vec<usize> = (0..grid.len()).collect();
    by_eta.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]));

    let mut totals = vec![0.0; grid.len()];
    for &(lo, hi) in &fold_bounds(n, folds) {
        let train = (0..lo).chain(hi..n);
        let gram = gram_of(z, train.clone());
        let zty = cross_of(z, y, train);
        let mut coef = vec![0.0; z.len()];
        for &g in &by_eta {
            lasso_gram(&gram, &zty, grid[g], &mut coef);
            let sse: f64 = (lo..hi)
                .map(|i| {
                    let pred: f64 = z.iter().zip(&coef).map(|(c, l)| c[i] * l).sum();
                    (y[i] - pred).powi(2)
                })
                .sum();
            totals[g] += sse / (hi - lo) as f64;
        }
    }
    let errors: Vec<f64> = totals.iter().map(|t| t / folds as f64).collect();

    let mut best = by_eta[0];
    for &g in &by_eta[1..] {
        if errors[g] < errors[best] {
            best = g;
        }
    }
    Ok(CvSelection {
        eta: grid[best],
        errors,
    })
}

/// `len` log-spaced values from `max` down to `min_ratio·max`.
pub fn log_grid(max: f64, min_ratio: f64, len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![max];
    }
    let step = min_ratio.ln() / (len - 1) as f64;
    (0..len).map(|t| max * (step * t as f64).exp()).collect()
}

/// Fits `(L, D)` for the data in its current column order.
pub fn fit_cholesky_factors(x: &CenteredData, cfg: &McdConfig) -> Result<McdFit> {
    cfg.validate()?;
    let n = x.n();
    let p = x.p();
    let divisor = cfg.denominator.divisor(n);
    let mut lower = vec![0.0; p * p];
    let mut d2 = Vec::with_capacity(p);
    let mut residuals: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut degenerate = Vec::new();

    for j in 0..p {
        let xj = x.column(j);
        lower[j * p + j] = 1.0;
        let e = if j == 0 {
            xj.to_vec()
        } else {
            let z: Vec<&[f64]> = residuals.iter().map(Vec::as_slice).collect();
            let eta = match cfg.eta {
                EtaPolicy::Fixed(eta) => eta,
                EtaPolicy::CrossValidated {
                    grid_len,
                    min_ratio,
                    folds,
                } => {
                    let eta_max = 2.0 * z.iter().map(|c| dot(c, xj).abs()).fold(0.0, f64::max);
                    if eta_max == 0.0 {
                        0.0
                    } else {
                        let grid = log_grid(eta_max, min_ratio, grid_len);
                        select_eta_cv(xj, &z, &grid, folds.min(n))?.eta
                    }
                }
            };
            let coef = lasso_regress(xj, &z, eta)?;
            let mut e = xj.to_vec();
            for (k, (&l, col)) in coef.iter().zip(&z).enumerate() {
                lower[j * p + k] = l;
                if l != 0.0 {
                    for (ei, ci) in e.iter_mut().zip(col.iter()) {
                        *ei -= l * ci;
                    }
                }
            }
            e
        };
        let mut var = dot(&e, &e) / divisor;
        if !(var >= RESIDUAL_VARIANCE_FLOOR) {
            warn!("residual variance {var:e} at position {j} floored to {RESIDUAL_VARIANCE_FLOOR:e}");
            var = RESIDUAL_VARIANCE_FLOOR;
            degenerate.push(j);
        }
        d2.push(var);
        residuals.push(e);
    }

    Ok(McdFit {
        factors: CholeskyFactors::new(p, lower, d2)?,
        residuals,
        degenerate,
    })
}

/// `L · diag(d2) · Lᵀ`.
pub fn compose_covariance(f: &CholeskyFactors) -> SymMatrix {
    let p = f.dim();
    let d2 = f.d2();
    SymMatrix::from_fn(p, |i, j| (0..=i.min(j)).map(|k| f.l(i, k) * d2[k] * f.l(j, k)).sum())
}

/// MCD estimate under `order`, mapped back to the original variable indices.
pub fn estimate_for_order(x: &CenteredData, order: &Permutation, cfg: &McdConfig) -> Result<SymMatrix> {
    let reordered = x.reorder(order)?;
    let fit = fit_cholesky_factors(&reordered, cfg)?;
    permute_sym(&compose_covariance(&fit.factors), order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_dist;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian_data(n: usize, p: usize, seed: u64) -> CenteredData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n * p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        DataMatrix::new(n, p, values).unwrap().center().unwrap()
    }

    /// Scalar objective `(y − z l)ᵀ(y − z l) + η|l|` scanned on a fine grid.
    fn scalar_grid_argmin(y: &[f64], z: &[f64], eta: f64) -> f64 {
        let obj = |l: f64| y.iter().zip(z).map(|(a, b)| (a - b * l).powi(2)).sum::<f64>() + eta * l.abs();
        (-20_000..=20_000)
            .map(|k| k as f64 * 1e-4)
            .min_by(|a, b| obj(*a).total_cmp(&obj(*b)))
            .unwrap()
    }

    #[test]
    fn lasso_unpenalized_orthonormal_is_least_squares() {
        let z0 = [1.0, 0.0, 0.0, 0.0];
        let z1 = [0.0, 0.6, 0.8, 0.0];
        let y = [0.3, -1.0, 2.0, 5.0];
        let coef = lasso_regress(&y, &[&z0, &z1], 0.0).unwrap();
        assert!((coef[0] - 0.3).abs() < 1e-12);
        assert!((coef[1] - (-0.6 + 1.6)).abs() < 1e-12);
    }

    #[test]
    fn lasso_one_dimensional_closed_form() {
        // zᵀz = 1, zᵀy = 1, η = 1
        let z = [1.0, 0.0];
        let y = [1.0, 3.0];
        let coef = lasso_regress(&y, &[&z], 1.0).unwrap();
        assert!((coef[0] - 0.5).abs() < 1e-12);
        assert!((scalar_grid_argmin(&y, &z, 1.0) - 0.5).abs() < 1e-4);

        let z = [0.5, -1.5, 2.0];
        let y = [1.0, -2.0, 0.7];
        for eta in [0.0, 0.5, 3.0, 9.0] {
            let coef = lasso_regress(&y, &[&z], eta).unwrap()[0];
            assert!((coef - scalar_grid_argmin(&y, &z, eta)).abs() < 1e-4, "eta={eta}");
        }
    }

    #[test]
    fn lasso_large_penalty_zeroes_everything() {
        let data = gaussian_data(20, 4, 3);
        let y = data.column(3);
        let z: Vec<&[f64]> = (0..3).map(|j| data.column(j)).collect();
        let eta_max = 2.0 * z.iter().map(|c| dot(c, y).abs()).fold(0.0, f64::max);
        assert_eq!(lasso_regress(y, &z, eta_max).unwrap(), vec![0.0; 3]);
        assert!(lasso_regress(y, &z, 0.9 * eta_max).unwrap().iter().any(|&c| c != 0.0));
    }

    #[test]
    fn lasso_zero_column_and_errors() {
        let zero = [0.0; 3];
        let z = [1.0, 2.0, 3.0];
        let y = [1.0, 2.0, 3.5];
        let coef = lasso_regress(&y, &[&zero, &z], 0.0).unwrap();
        assert_eq!(coef[0], 0.0);
        assert!(coef[1].is_finite());
        assert!(lasso_regress(&y, &[&[1.0, 2.0][..]], 0.0).is_err());
        assert!(lasso_regress(&y, &[&z], -1.0).is_err());
    }

    #[test]
    fn lasso_sparsity_is_monotone_in_eta() {
        let data = gaussian_data(30, 8, 5);
        let y = data.column(7);
        let z: Vec<&[f64]> = (0..7).map(|j| data.column(j)).collect();
        let eta_max = 2.0 * z.iter().map(|c| dot(c, y).abs()).fold(0.0, f64::max);
        let counts: Vec<usize> = log_grid(eta_max, 1e-3, 10)
            .iter()
            .rev()
            .map(|&eta| lasso_regress(y, &z, eta).unwrap().iter().filter(|&&c| c != 0.0).count())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
    }

    #[test]
    fn cv_single_value_grid() {
        let data = gaussian_data(10, 3, 9);
        let z: Vec<&[f64]> = vec![data.column(0), data.column(1)];
        let sel = select_eta_cv(data.column(2), &z, &[0.7], 5).unwrap();
        assert_eq!(sel.eta, 0.7);
        assert!(matches!(select_eta_cv(data.column(2), &z, &[], 5), Err(Error::EmptyGrid)));
        assert!(select_eta_cv(data.column(2), &z, &[0.1], 1).is_err());
        assert!(select_eta_cv(data.column(2), &z, &[0.1], 11).is_err());
    }

    #[test]
    fn cv_noiseless_linear_prefers_zero() {
        let z0 = [1.0, -2.0, 0.5, 3.0, -1.0, 2.5];
        let z1 = [0.3, 1.0, -1.5, 0.2, 2.0, -0.7];
        let y: Vec<f64> = z0.iter().zip(&z1).map(|(a, b)| 2.0 * a - b).collect();
        let sel = select_eta_cv(&y, &[&z0, &z1], &[0.0, 1e3], 3).unwrap();
        assert_eq!(sel.eta, 0.0);
        assert!(sel.errors[0] < 1e-16, "{:?}", sel.errors);
        assert!(sel.errors[1] > 0.1);
    }

    #[test]
    fn cv_errors_match_hand_computed_folds() {
        // n = 4, two folds {0,1} and {2,3}, one predictor, η = 0 and η = 1.
        let z = [1.0, 2.0, 1.0, -1.0];
        let y = [1.0, 1.0, 2.0, 0.0];
        let sel = select_eta_cv(&y, &[&z], &[0.0, 1.0], 2).unwrap();
        // Fold A trains on rows 2,3: zᵀz = 2, zᵀy = 2.
        //   η=0: l = 1; held-out errors (1−1)², (1−2)² → mean 0.5
        //   η=1: l = (2 − 0.5)/2 = 0.75; errors 0.25², 0.5² → mean 0.15625
        // Fold B trains on rows 0,1: zᵀz = 5, zᵀy = 3.
        //   η=0: l = 0.6; errors (2−0.6)², (0+0.6)² → mean 1.16
        //   η=1: l = 0.5; errors 1.5², 0.5² → mean 1.25
        assert!((sel.errors[0] - (0.5 + 1.16) / 2.0).abs() < 1e-12);
        assert!((sel.errors[1] - (0.15625 + 1.25) / 2.0).abs() < 1e-12);
        assert_eq!(sel.eta, 1.0);
    }

    #[test]
    fn cv_ties_prefer_larger_eta() {
        let z = [1.0, -1.0, 1.0, -1.0];
        let y = [0.5, 0.5, 0.5, 0.5];
        // every fold's training correlation is zero, so all fits are zero
        let sel = select_eta_cv(&y, &[&z], &[0.0, 2.0, 1.0], 2).unwrap();
        assert_eq!(sel.eta, 2.0);
    }

    #[test]
    fn single_variable_fit() {
        let x = DataMatrix::from_rows(&[vec![1.0], vec![3.0], vec![5.0]]).unwrap().center().unwrap();
        let fit = fit_cholesky_factors(&x, &McdConfig::default()).unwrap();
        assert_eq!(fit.factors.lower(), &[1.0]);
        assert!((fit.factors.d2()[0] - 8.0 / 3.0).abs() < 1e-14);
        assert_eq!(fit.residuals[0], x.column(0));
    }

    #[test]
    fn huge_eta_gives_identity_l() {
        let x = gaussian_data(15, 5, 21);
        let fit = fit_cholesky_factors(&x, &McdConfig::fixed_eta(1e12)).unwrap();
        let s = x.sample_covariance(VarianceDenominator::N);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(fit.factors.l(i, j), if i == j { 1.0 } else { 0.0 });
            }
            assert!((fit.factors.d2()[i] - s.get(i, i)).abs() < 1e-14);
        }
    }

    /// Forward elimination `S = L D Lᵀ`, written independently of the
    /// regression path.
    fn ldl_oracle(s: &SymMatrix) -> (Vec<f64>, Vec<f64>) {
        let p = s.dim();
        let mut l = vec![0.0f64; p * p];
        let mut d = vec![0.0; p];
        for j in 0..p {
            let mut dj = s.get(j, j);
            for k in 0..j {
                dj -= l[j * p + k].powi(2) * d[k];
            }
            d[j] = dj;
            l[j * p + j] = 1.0;
            for i in (j + 1)..p {
                let mut v = s.get(i, j);
                for k in 0..j {
                    v -= l[i * p + k] * l[j * p + k] * d[k];
                }
                l[i * p + j] = v / dj;
            }
        }
        (l, d)
    }

    #[test]
    fn unpenalized_fit_is_exact_ldl_of_sample_covariance() {
        let x = gaussian_data(50, 10, 4);
        let s = x.sample_covariance(VarianceDenominator::N);
        let fit = fit_cholesky_factors(&x, &McdConfig::fixed_eta(0.0)).unwrap();
        let (l, d) = ldl_oracle(&s);
        for (a, b) in fit.factors.lower().iter().zip(&l) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in fit.factors.d2().iter().zip(&d) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(frobenius_dist(&compose_covariance(&fit.factors), &s).unwrap() < 1e-8);

        // residual orthogonality
        for j in 1..10 {
            for k in 0..j {
                assert!(dot(&fit.residuals[j], &fit.residuals[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn unpenalized_estimate_is_order_free() {
        let x = gaussian_data(50, 10, 8);
        let s = x.sample_covariance(VarianceDenominator::N);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let order = Permutation::random(10, &mut rng);
            let est = estimate_for_order(&x, &order, &McdConfig::fixed_eta(0.0)).unwrap();
            assert!(frobenius_dist(&est, &s).unwrap() <= 1e-8);
            for i in 0..10 {
                assert!((est.get(i, i) - s.get(i, i)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn identity_order_matches_plain_fit() {
        let x = gaussian_data(25, 6, 13);
        let cfg = McdConfig::default();
        let plain = compose_covariance(&fit_cholesky_factors(&x, &cfg).unwrap().factors);
        assert_eq!(estimate_for_order(&x, &Permutation::identity(6), &cfg).unwrap(), plain);
    }

    #[test]
    fn compose_examples() {
        let f = CholeskyFactors::new(3, SymMatrix::identity(3).as_slice().to_vec(), vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(compose_covariance(&f), SymMatrix::from_diag(&[1.0, 2.0, 3.0]));

        let f = CholeskyFactors::new(2, vec![1.0, 0.0, 0.5, 1.0], vec![1.0, 1.0]).unwrap();
        let want = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.25]]).unwrap();
        assert_eq!(compose_covariance(&f), want);
    }

    #[test]
    fn factor_validation() {
        assert!(CholeskyFactors::new(2, vec![1.0, 0.1, 0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(CholeskyFactors::new(2, vec![2.0, 0.0, 0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(CholeskyFactors::new(2, vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn compose_is_positive_definite_for_random_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let p = rng.random_range(1..12);
            let mut lower = vec![0.0; p * p];
            for i in 0..p {
                lower[i * p + i] = 1.0;
                for j in 0..i {
                    lower[i * p + j] = rng.random_range(-2.0..2.0);
                }
            }
            let d2: Vec<f64> = (0..p).map(|_| rng.random_range(0.05..3.0)).collect();
            let sigma = compose_covariance(&CholeskyFactors::new(p, lower, d2).unwrap());
            assert!(sigma.min_eigenvalue().unwrap() > 1e-10);
        }
    }

    #[test]
    fn degenerate_residual_is_floored() {
        // second column is an exact multiple of the first
        let x = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![4.0, 8.0]])
            .unwrap()
            .center()
            .unwrap();
        let fit = fit_cholesky_factors(&x, &McdConfig::fixed_eta(0.0)).unwrap();
        assert_eq!(fit.degenerate, vec![1]);
        assert_eq!(fit.factors.d2()[1], RESIDUAL_VARIANCE_FLOOR);
    }

    #[test]
    fn centering_and_denominators() {
        let raw = DataMatrix::from_rows(&[vec![1.0, 10.0], vec![2.0, 20.0], vec![6.0, 0.0]]).unwrap();
        let x = raw.center().unwrap();
        for j in 0..2 {
            assert!(x.column(j).iter().sum::<f64>().abs() < 1e-10);
        }
        let sn = x.sample_covariance(VarianceDenominator::N);
        let sn1 = x.sample_covariance(VarianceDenominator::NMinusOne);
        assert!((sn.get(0, 1) * 3.0 - sn1.get(0, 1) * 2.0).abs() < 1e-12);
        assert!(DataMatrix::from_rows(&[vec![1.0]]).unwrap().center().is_err());
        assert!(DataMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(DataMatrix::new(1, 1, vec![f64::NAN]).is_err());
    }
}
