//! Dense matrices and a one-sided Jacobi SVD.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols,
                rhs.rows,
                rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch("shapes differ".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `A = U diag(s) V^T` truncated (or not) to `rank` components.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    /// `M x r`, orthonormal columns.
    pub left_vectors: Matrix,
    /// `V x r`, orthonormal columns.
    pub right_vectors: Matrix,
    pub rank: usize,
    pub retained_energy: f64,
}

impl SvdResult {
    /// `U_r diag(s_r) V_r^T`.
    pub fn reconstruct(&self) -> Matrix {
        let m = self.left_vectors.rows();
        let n = self.right_vectors.rows();
        let mut out = Matrix::zeros(m, n);
        for k in 0..self.rank {
            let s = self.singular_values[k];
            for i in 0..m {
                let us = self.left_vectors[(i, k)] * s;
                if us == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += us * self.right_vectors[(j, k)];
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 100;

/// Full thin SVD (`r = min(M, V)`).
pub fn svd(a: &Matrix) -> Result<SvdResult> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::invalid("SVD needs a non-empty matrix"));
    }
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    if a.rows() >= a.cols() {
        let (s, u, v) = jacobi_tall(a);
        let r = s.len();
        Ok(SvdResult { singular_values: s, left_vectors: u, right_vectors: v, rank: r, retained_energy: 1.0 })
    } else {
        let (s, v, u) = jacobi_tall(&a.transpose());
        let r = s.len();
        Ok(SvdResult { singular_values: s, left_vectors: u, right_vectors: v, rank: r, retained_energy: 1.0 })
    }
}

/// One-sided Jacobi on the columns of a tall `m x n` matrix (`m >= n`).
/// Returns singular values (descending), `U` (`m x n`) and `V` (`n x n`).
fn jacobi_tall(a: &Matrix) -> (Vec<f64>, Matrix, Matrix) {
    let m = a.rows();
    let n = a.cols();
    // column-major working copy
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || libm::fabs(gamma) <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| libm::sqrt(c.iter().map(|x| x * x).sum())).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s_max = norms[order[0]];

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut v_mat = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        let candidate = if sigma > 0.0 && sigma > s_max * eps * (m as f64) {
            Some(cols[j].iter().map(|x| x / sigma).collect::<Vec<f64>>())
        } else {
            None
        };
        u_cols.push(orthonormal_completion(candidate, &u_cols, m));
        s.push(sigma);
        for i in 0..n {
            v_mat[(i, k)] = v[j][i];
        }
    }

    let mut u = Matrix::zeros(m, n);
    for (k, col) in u_cols.iter().enumerate() {
        for i in 0..m {
            u[(i, k)] = col[i];
        }
    }
    (s, u, v_mat)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Orthonormalizes `candidate` against `basis` (two Gram-Schmidt passes).
/// Falls back to standard basis vectors when the candidate is missing or
/// collapses.
fn orthonormal_completion(candidate: Option<Vec<f64>>, basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let try_vec = |mut x: Vec<f64>| -> Option<Vec<f64>> {
        for _ in 0..2 {
            for b in basis {
                let d: f64 = x.iter().zip(b).map(|(a, b)| a * b).sum();
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= d * bi;
                }
            }
        }
        let norm = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
        if norm > 0.5 {
            Some(x.into_iter().map(|v| v / norm).collect())
        } else {
            None
        }
    };
    if let Some(x) = candidate.and_then(try_vec) {
        return x;
    }
    (0..m)
        .find_map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            try_vec(e)
        })
        .expect("fewer than m basis vectors already chosen")
}

/// Features retaining a share of the squared singular value mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    /// `M x r` matrix `U_r diag(s_r)`.
    pub features: Matrix,
    pub rank: usize,
    pub retained_energy: f64,
    pub singular_values: Vec<f64>,
}

/// Smallest rank `r` whose cumulative energy fraction reaches `threshold`.
/// An all-zero spectrum yields `r = 1`.
pub fn energy_rank(singular_values: &[f64], threshold: f64) -> (usize, f64) {
    let total: f64 = singular_values.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return (1, 1.0);
    }
    let mut cum = 0.0;
    for (i, s) in singular_values.iter().enumerate() {
        cum += s * s;
        if cum / total >= threshold {
            return (i + 1, cum / total);
        }
    }
    (singular_values.len(), 1.0)
}

pub fn reduce_energy(a: &Matrix, threshold: f64) -> Result<Reduced> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(alloc::format!("energy threshold must be in (0, 1], got {threshold}")));
    }
    let full = svd(a)?;
    let (r, energy) = energy_rank(&full.singular_values, threshold);
    let mut features = Matrix::zeros(a.rows(), r);
    for i in 0..a.rows() {
        for k in 0..r {
            features[(i, k)] = full.left_vectors[(i, k)] * full.singular_values[k];
        }
    }
    Ok(Reduced { features, rank: r, retained_energy: energy, singular_values: full.singular_values })
}

/// Truncates a full decomposition to its leading `rank` components.
pub fn truncate(full: &SvdResult, rank: usize) -> SvdResult {
    let rank = rank.min(full.rank);
    let pick = |m: &Matrix| {
        let mut out = Matrix::zeros(m.rows(), rank);
        for i in 0..m.rows() {
            for k in 0..rank {
                out[(i, k)] = m[(i, k)];
            }
        }
        out
    };
    let total: f64 = full.singular_values.iter().map(|s| s * s).sum();
    let kept: f64 = full.singular_values[..rank].iter().map(|s| s * s).sum();
    SvdResult {
        singular_values: full.singular_values[..rank].to_vec(),
        left_vectors: pick(&full.left_vectors),
        right_vectors: pick(&full.right_vectors),
        rank,
        retained_energy: if total == 0.0 { 1.0 } else { kept / total },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_singular_values() {
        let r = svd(&Matrix::identity(3)).unwrap();
        assert_eq!(r.singular_values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_singular_values_sorted() {
        let r = svd(&Matrix::diag(&[3.0, 4.0])).unwrap();
        assert!((r.singular_values[0] - 4.0).abs() < 1e-14);
        assert!((r.singular_values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn energy_ranks() {
        assert_eq!(reduce_energy(&Matrix::diag(&[4.0, 3.0]), 0.95).unwrap().rank, 2);
        assert_eq!(reduce_energy(&Matrix::diag(&[4.0, 3.0]), 0.6).unwrap().rank, 1);
        assert_eq!(reduce_energy(&Matrix::identity(3), 0.95).unwrap().rank, 3);
        let rank_one = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        for t in [0.1, 0.5, 0.95, 1.0] {
            assert_eq!(reduce_energy(&rank_one, t).unwrap().rank, 1);
        }
    }

    #[test]
    fn rank_deficient_vectors_stay_orthonormal() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]]).unwrap();
        let r = svd(&a).unwrap();
        let utu = r.left_vectors.transpose().matmul(&r.left_vectors).unwrap();
        assert!(utu.sub(&Matrix::identity(3)).unwrap().frobenius_norm() < 1e-12);
        assert!(r.reconstruct().sub(&a).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn wide_matrix() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let r = svd(&a).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.left_vectors.rows(), 2);
        assert_eq!(r.right_vectors.rows(), 3);
        assert!(r.reconstruct().sub(&a).unwrap().frobenius_norm() < 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(svd(&Matrix::zeros(0, 0)).is_err());
        let mut m = Matrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(svd(&m).is_err());
        assert!(reduce_energy(&Matrix::identity(2), 0.0).is_err());
        assert!(reduce_energy(&Matrix::identity(2), 1.5).is_err());
    }

    #[test]
    fn zero_matrix() {
        let r = reduce_energy(&Matrix::zeros(3, 2), 0.95).unwrap();
        assert_eq!(r.rank, 1);
        assert!(r.features.as_slice().iter().all(|&x| x == 0.0));
    }
}
