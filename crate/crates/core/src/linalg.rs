//! Dense symmetric matrix primitives.
//!
//! Everything downstream (per-order estimates, the ensemble average, the ADMM
//! iterates, the true covariance models) is a [`SymMatrix`]. Storage is a full
//! row-major `p × p` buffer that is symmetrized on construction, so
//! `get(i, j) == get(j, i)` holds bit-for-bit.

use std::ops::{Add, Mul, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Jacobi stops once the off-diagonal Frobenius mass falls below this
/// fraction of the input norm.
const JACOBI_REL_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from a row-major buffer, averaging it with its transpose.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("matrix dimension must be at least 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        let mut m = Self { dim, data };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// Fills entry `(i, j)` for `i <= j` from `f` and mirrors it.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| 0.0)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Wraps a buffer the caller guarantees to be exactly symmetric.
    pub(crate) fn from_symmetric_unchecked(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        let m = Self { dim, data };
        debug_assert!(m.is_exactly_symmetric());
        m
    }

    fn symmetrize(&mut self) {
        let p = self.dim;
        for i in 0..p {
            for j in (i + 1)..p {
                let v = 0.5 * (self.data[i * p + j] + self.data[j * p + i]);
                self.data[i * p + j] = v;
                self.data[j * p + i] = v;
            }
        }
    }

    fn is_exactly_symmetric(&self) -> bool {
        let p = self.dim;
        (0..p).all(|i| ((i + 1)..p).all(|j| self.data[i * p + j].to_bits() == self.data[j * p + i].to_bits()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Row-major view of the full matrix.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_offdiag(&self) -> f64 {
        let p = self.dim;
        let mut best = 0.0_f64;
        for i in 0..p {
            for j in (i + 1)..p {
                best = best.max(self.get(i, j).abs());
            }
        }
        best
    }

    /// Number of off-diagonal pairs `i < j` with `|m_ij| > zero_tol`.
    pub fn offdiag_nonzeros(&self, zero_tol: f64) -> usize {
        let p = self.dim;
        (0..p)
            .map(|i| ((i + 1)..p).filter(|&j| self.get(i, j).abs() > zero_tol).count())
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_symmetric_unchecked(self.dim, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Matrix with `value` added to every diagonal entry.
    pub fn shift_diag(&self, value: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.data[i * self.dim + i] += value;
        }
        out
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = sym_eig(self)?;
        Ok(*eig.values.last().expect("dim >= 1"))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(())
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: f64) -> SymMatrix {
        self.scale(rhs)
    }
}

/// Full spectrum of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Eigenvalues, non-increasing.
    pub values: Vec<f64>,
    /// Row-major `p × p`; column `i` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<f64>,
}

impl EigenPair {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        let p = self.dim();
        (0..p).map(|r| self.vectors[r * p + i]).collect()
    }

    /// `V · diag(f(λ)) · Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let p = self.dim();
        let w: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        SymMatrix::from_fn(p, |i, j| {
            (0..p).map(|k| v[i * p + k] * w[k] * v[j * p + k]).sum()
        })
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig(m: &SymMatrix) -> Result<EigenPair> {
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix passed to sym_eig"));
    }
    debug_assert!(m.is_exactly_symmetric());
    let p = m.dim();
    let mut a = m.data.clone();
    let mut v = vec![0.0; p * p];
    for i in 0..p {
        v[i * p + i] = 1.0;
    }

    let threshold = JACOBI_REL_TOL * m.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..p)
            .flat_map(|i| ((i + 1)..p).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * a[i * p + j] * a[i * p + j])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for r in 0..p {
            for s in (r + 1)..p {
                let ars = a[r * p + s];
                if ars == 0.0 {
                    continue;
                }
                let theta = (a[s * p + s] - a[r * p + r]) / (2.0 * ars);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..p {
                    let akr = a[k * p + r];
                    let aks = a[k * p + s];
                    a[k * p + r] = c * akr - sn * aks;
                    a[k * p + s] = sn * akr + c * aks;
                }
                for k in 0..p {
                    let ark = a[r * p + k];
                    let ask = a[s * p + k];
                    a[r * p + k] = c * ark - sn * ask;
                    a[s * p + k] = sn * ark + c * ask;
                }
                a[r * p + s] = 0.0;
                a[s * p + r] = 0.0;
                for k in 0..p {
                    let vkr = v[k * p + r];
                    let vks = v[k * p + s];
                    v[k * p + r] = c * vkr - sn * vks;
                    v[k * p + s] = sn * vkr + c * vks;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| a[y * p + y].total_cmp(&a[x * p + x]));
    let values = order.iter().map(|&k| a[k * p + k]).collect();
    let mut vectors = vec![0.0; p * p];
    for (col, &k) in order.iter().enumerate() {
        for r in 0..p {
            vectors[r * p + col] = v[r * p + k];
        }
    }
    Ok(EigenPair { values, vectors })
}

/// Clamps every eigenvalue below `nu` up to `nu`.
///
/// Inputs already satisfying `m ⪰ nu·I` (checked by a Cholesky factorization
/// of `m − nu·I`) are returned unchanged, skipping the eigendecomposition.
pub fn project_psd_floor(m: &SymMatrix, nu: f64) -> Result<SymMatrix> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(invalid(format!("eigenvalue floor must be positive, got {nu}")));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix passed to project_psd_floor"));
    }
    if Cholesky::new(&m.shift_diag(-nu)).is_ok() {
        return Ok(m.clone());
    }
    let eig = sym_eig(m)?;
    Ok(eig.reconstruct_with(|l| l.max(nu)))
}

#[inline]
pub fn soft_threshold(z: f64, delta: f64) -> f64 {
    z.signum() * (z.abs() - delta).max(0.0)
}

/// Soft-thresholds off-diagonal entries by `delta`; the diagonal is copied.
pub fn soft_threshold_offdiag(m: &SymMatrix, delta: f64) -> Result<SymMatrix> {
    if !(delta >= 0.0) {
        return Err(invalid(format!("threshold must be non-negative, got {delta}")));
    }
    let p = m.dim();
    let mut data = m.data.clone();
    for i in 0..p {
        for j in 0..p {
            if i != j {
                data[i * p + j] = soft_threshold(data[i * p + j], delta);
            }
        }
    }
    Ok(SymMatrix::from_symmetric_unchecked(p, data))
}

/// `‖a − b‖_F`.
pub fn frobenius_dist(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// A bijection on `{0, …, p−1}` stored with its inverse.
///
/// `forward[k]` is the original variable placed at position `k` of the order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let p = forward.len();
        if p == 0 {
            return Err(invalid("permutation must have at least one element"));
        }
        let mut inverse = vec![usize::MAX; p];
        for (pos, &var) in forward.iter().enumerate() {
            if var >= p || inverse[var] != usize::MAX {
                return Err(invalid(format!("{forward:?} is not a permutation of 0..{p}")));
            }
            inverse[var] = pos;
        }
        Ok(Self { forward, inverse })
    }

    pub fn identity(p: usize) -> Self {
        let forward: Vec<usize> = (0..p).collect();
        Self {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Uniform draw by Fisher–Yates.
    pub fn random<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Self {
        let mut forward: Vec<usize> = (0..p).collect();
        for i in (1..p).rev() {
            let j = rng.random_range(0..=i);
            forward.swap(i, j);
        }
        Self::new(forward).expect("shuffle of 0..p is a permutation")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn inverted(&self) -> Self {
        Self {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// Permutation similarity `P m Pᵀ`: `out[i][j] = m[π⁻¹(i)][π⁻¹(j)]`.
pub fn permute_sym(m: &SymMatrix, perm: &Permutation) -> Result<SymMatrix> {
    let p = m.dim();
    if perm.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            actual: perm.len(),
        });
    }
    let inv = perm.inverse();
    let mut data = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            data[i * p + j] = m.get(inv[i], inv[j]);
        }
    }
    Ok(SymMatrix::from_symmetric_unchecked(p, data))
}

/// Lower-triangular factor `G` with `G Gᵀ = A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn new(a: &SymMatrix) -> Result<Self> {
        let p = a.dim();
        let mut g = vec![0.0; p * p];
        for j in 0..p {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= g[j * p + k] * g[j * p + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let djj = d.sqrt();
            g[j * p + j] = djj;
            for i in (j + 1)..p {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= g[i * p + k] * g[j * p + k];
                }
                g[i * p + j] = s / djj;
            }
        }
        Ok(Self { dim: p, lower: g })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn log_det(&self) -> f64 {
        (0..self.dim).map(|i| 2.0 * self.lower[i * self.dim + i].ln()).sum()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let p = self.dim;
        let g = &self.lower;
        for i in 0..p {
            let mut s = b[i];
            for k in 0..i {
                s -= g[i * p + k] * b[k];
            }
            b[i] = s / g[i * p + i];
        }
        for i in (0..p).rev() {
            let mut s = b[i];
            for k in (i + 1)..p {
                s -= g[k * p + i] * b[k];
            }
            b[i] = s / g[i * p + i];
        }
    }

    /// `A⁻¹ B` for symmetric `B`, returned as a general row-major matrix.
    pub fn solve_matrix(&self, b: &SymMatrix) -> Vec<f64> {
        let p = self.dim;
        let mut out = vec![0.0; p * p];
        let mut col = vec![0.0; p];
        for j in 0..p {
            for i in 0..p {
                col[i] = b.get(i, j);
            }
            self.solve_in_place(&mut col);
            for i in 0..p {
                out[i * p + j] = col[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> SymMatrix {
        let raw = self.solve_matrix(&SymMatrix::identity(self.dim));
        SymMatrix::new(self.dim, raw).expect("square buffer")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn random_sym(p: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        SymMatrix::from_fn(p, |_, _| rng.random_range(-1.0..1.0))
    }

    fn check_eig(m: &SymMatrix) {
        let p = m.dim();
        let eig = sym_eig(m).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        for a in 0..p {
            for b in 0..p {
                let dot: f64 = (0..p).map(|r| eig.vectors[r * p + a] * eig.vectors[r * p + b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!(close(dot, want, 1e-10), "VᵀV[{a}][{b}] = {dot}");
            }
        }
        let err = frobenius_dist(&eig.reconstruct(), m).unwrap();
        assert!(err <= 1e-8 * p as f64, "reconstruction error {err}");
    }

    #[test]
    fn eig_identity() {
        let eig = sym_eig(&SymMatrix::identity(3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
        check_eig(&SymMatrix::identity(3));
    }

    #[test]
    fn eig_diagonal_keeps_standard_basis() {
        let eig = sym_eig(&SymMatrix::from_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(eig.values, vec![3.0, 1.0]);
        assert_eq!(eig.vectors, vec![1.0, 0.0, 0.0, 1.0]);
        let eig = sym_eig(&SymMatrix::from_diag(&[1.0, 3.0])).unwrap();
        assert_eq!(eig.values, vec![3.0, 1.0]);
        assert_eq!(eig.vector(0), vec![0.0, 1.0]);
    }

    #[test]
    fn eig_two_by_two_swap() {
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let eig = sym_eig(&m).unwrap();
        assert!(close(eig.values[0], 1.0, 1e-14) && close(eig.values[1], -1.0, 1e-14));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = eig.vector(0);
        let v1 = eig.vector(1);
        let s0 = v0[0].signum();
        assert!(close(s0 * v0[0], h, 1e-14) && close(s0 * v0[1], h, 1e-14));
        let s1 = v1[0].signum();
        assert!(close(s1 * v1[0], h, 1e-14) && close(s1 * v1[1], -h, 1e-14));
    }

    #[test]
    fn eig_rejects_non_finite() {
        let m = SymMatrix::from_rows(&[vec![1.0, f64::NAN], vec![f64::NAN, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&m), Err(Error::NonFinite(_))));
        assert!(project_psd_floor(&m, 1e-4).is_err());
    }

    #[test]
    fn eig_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [1, 2, 5, 17, 40] {
            check_eig(&random_sym(p, &mut rng));
        }
    }

    #[test]
    fn psd_floor_examples() {
        let nu = 1e-4;
        assert_eq!(project_psd_floor(&SymMatrix::identity(3), nu).unwrap(), SymMatrix::identity(3));

        let out = project_psd_floor(&SymMatrix::from_diag(&[2.0, -1.0]), nu).unwrap();
        let want = SymMatrix::from_diag(&[2.0, nu]);
        assert!(frobenius_dist(&out, &want).unwrap() < 1e-14);

        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let out = project_psd_floor(&m, nu).unwrap();
        let (a, b) = ((1.0 + nu) / 2.0, (1.0 - nu) / 2.0);
        let want = SymMatrix::from_rows(&[vec![a, b], vec![b, a]]).unwrap();
        assert!(frobenius_dist(&out, &want).unwrap() < 1e-14);
    }

    #[test]
    fn psd_floor_rejects_bad_floor() {
        assert!(project_psd_floor(&SymMatrix::identity(2), 0.0).is_err());
        assert!(project_psd_floor(&SymMatrix::identity(2), -1.0).is_err());
    }

    #[test]
    fn psd_floor_random_min_eigenvalue_and_idempotence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let nu = 1e-4;
        for k in 0..100 {
            let p = 1 + k % 50;
            let m = random_sym(p, &mut rng);
            let once = project_psd_floor(&m, nu).unwrap();
            assert!(once.min_eigenvalue().unwrap() >= nu - 1e-8);
            let twice = project_psd_floor(&once, nu).unwrap();
            assert!(frobenius_dist(&once, &twice).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn soft_threshold_examples() {
        let m = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 2.0]]).unwrap();
        let out = soft_threshold_offdiag(&m, 0.2).unwrap();
        assert_eq!(out.diag(), vec![2.0, 2.0]);
        assert!(close(out.get(0, 1), 0.3, 1e-15));
        assert_eq!(soft_threshold_offdiag(&m, 0.0).unwrap(), m);

        let m = SymMatrix::from_rows(&[vec![1.0, -0.1], vec![-0.1, 1.0]]).unwrap();
        assert_eq!(soft_threshold_offdiag(&m, 0.2).unwrap().get(1, 0), 0.0);
        assert!(soft_threshold_offdiag(&m, -0.1).is_err());
    }

    #[test]
    fn permute_examples() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(permute_sym(&m, &Permutation::identity(2)).unwrap(), m);
        let swap = Permutation::new(vec![1, 0]).unwrap();
        let want = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(permute_sym(&m, &swap).unwrap(), want);
        assert!(permute_sym(&m, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn permute_convention() {
        // position k of the order holds variable forward[k]
        let m = SymMatrix::from_fn(3, |i, j| (10 * i + j) as f64 + (10 * j + i) as f64);
        let perm = Permutation::new(vec![2, 0, 1]).unwrap();
        let out = permute_sym(&m, &perm).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(out.get(perm.forward()[i], perm.forward()[j]), m.get(i, j));
            }
        }
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![]).is_err());
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.inverse(), &[1, 2, 0]);
        for i in 0..3 {
            assert_eq!(p.inverse()[p.forward()[i]], i);
        }
    }

    #[test]
    fn frobenius_examples() {
        let a = SymMatrix::identity(3);
        assert_eq!(frobenius_dist(&a, &a).unwrap(), 0.0);
        assert!(close(frobenius_dist(&a, &SymMatrix::zeros(3)).unwrap(), 3f64.sqrt(), 1e-15));
        assert!(frobenius_dist(&a, &SymMatrix::zeros(2)).is_err());
    }

    #[test]
    fn cholesky_solves_and_log_det() {
        let a = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let c = Cholesky::new(&a).unwrap();
        assert!(close(c.log_det(), 8f64.ln(), 1e-14));
        let mut b = vec![1.0, 2.0];
        c.solve_in_place(&mut b);
        assert!(close(4.0 * b[0] + 2.0 * b[1], 1.0, 1e-14));
        assert!(close(2.0 * b[0] + 3.0 * b[1], 2.0, 1e-14));
        assert!(Cholesky::new(&SymMatrix::from_diag(&[1.0, 0.0])).is_err());
    }

    fn sym_strategy() -> impl Strategy<Value = SymMatrix> {
        (1usize..12).prop_flat_map(|p| {
            prop::collection::vec(-5.0f64..5.0, p * p).prop_map(move |d| SymMatrix::new(p, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn soft_threshold_shrinks_and_keeps_diag(m in sym_strategy(), delta in 0.0f64..3.0) {
            let out = soft_threshold_offdiag(&m, delta).unwrap();
            for i in 0..m.dim() {
                prop_assert_eq!(out.get(i, i).to_bits(), m.get(i, i).to_bits());
                for j in 0..m.dim() {
                    prop_assert!(out.get(i, j).abs() <= m.get(i, j).abs());
                }
            }
        }

        #[test]
        fn permutation_preserves_spectrum_and_norm(m in sym_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let perm = Permutation::random(m.dim(), &mut rng);
            let pm = permute_sym(&m, &perm).unwrap();
            prop_assert!((pm.frobenius_norm() - m.frobenius_norm()).abs() <= 1e-14 * (1.0 + m.frobenius_norm()));
            let a = sym_eig(&m).unwrap().values;
            let b = sym_eig(&pm).unwrap().values;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-8);
            }
            let back = permute_sym(&pm, &perm.inverted()).unwrap();
            prop_assert_eq!(back, m.clone());

            let other = m.scale(0.5).shift_diag(1.0);
            let d0 = frobenius_dist(&m, &other).unwrap();
            let d1 = frobenius_dist(&pm, &permute_sym(&other, &perm).unwrap()).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-12 * (1.0 + d0));
        }
    }
}
