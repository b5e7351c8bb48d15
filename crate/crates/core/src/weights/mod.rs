//! Sparse spatial weights.
//!
//! Weights are held in compressed row form. Stored entries are strictly
//! positive and never on the diagonal; rows without entries are islands.
//! Locations are indexed from 0 internally and row-major from the top-left
//! corner for lattices.

pub mod gal;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialWeights<T> {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
    row_standardized: bool,
    islands: Vec<usize>,
}

impl<T: Scalar> SpatialWeights<T> {
    /// Builds weights from one neighbor list per location.
    ///
    /// Each row is sorted by column index. Self-links, duplicate neighbors,
    /// out-of-range indices and non-positive weights are rejected.
    pub fn from_neighbor_lists(rows: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut islands = Vec::new();
        offsets.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            for (k, &(j, w)) in row.iter().enumerate() {
                if j >= n {
                    return Err(Error::IndexOutOfRange { index: j, n });
                }
                if j == i {
                    return Err(Error::SelfNeighbor(i));
                }
                if k > 0 && row[k - 1].0 == j {
                    return Err(Error::DuplicateNeighbor { row: i, col: j });
                }
                if !(w.is_finite() && w > T::zero()) {
                    return Err(Error::InvalidWeight { row: i, col: j, value: w.as_f64() });
                }
                cols.push(j);
                vals.push(w);
            }
            if row.is_empty() {
                islands.push(i);
            }
            offsets.push(cols.len());
        }
        Ok(Self { n, offsets, cols, vals, row_standardized: false, islands })
    }

    /// Binary weights from unweighted neighbor lists.
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_neighbor_lists(
            adjacency.into_iter().map(|row| row.into_iter().map(|j| (j, T::one())).collect()).collect(),
        )
    }

    /// Binary rook contiguity (shared edges) on a `rows x cols` lattice.
    ///
    /// With `torus` the lattice wraps at its borders; on lattices with at
    /// least three rows and columns every cell then has exactly 4 neighbors.
    pub fn lattice_rook(rows: usize, cols: usize, torus: bool) -> Result<Self> {
        Self::lattice(rows, cols, torus, &[(-1, 0), (0, -1), (0, 1), (1, 0)])
    }

    /// Binary queen contiguity (shared edges or corners).
    pub fn lattice_queen(rows: usize, cols: usize, torus: bool) -> Result<Self> {
        Self::lattice(rows, cols, torus, &[(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)])
    }

    fn lattice(rows: usize, cols: usize, torus: bool, steps: &[(isize, isize)]) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols < 2 {
            return Err(Error::TooFewCells { rows, cols });
        }
        let (r, c) = (rows as isize, cols as isize);
        let adjacency = (0..rows * cols)
            .map(|cell| {
                let (i, j) = ((cell / cols) as isize, (cell % cols) as isize);
                let mut nb: Vec<usize> = steps
                    .iter()
                    .filter_map(|&(di, dj)| {
                        let (mut ni, mut nj) = (i + di, j + dj);
                        if torus {
                            ni = ni.rem_euclid(r);
                            nj = nj.rem_euclid(c);
                        } else if ni < 0 || nj < 0 || ni >= r || nj >= c {
                            return None;
                        }
                        Some((ni * c + nj) as usize)
                    })
                    .filter(|&k| k != cell)
                    .collect();
                // small tori wrap onto the same neighbor twice
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        Self::from_adjacency(adjacency)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn is_row_standardized(&self) -> bool {
        self.row_standardized
    }

    /// Rows with no stored entries, ascending.
    pub fn islands(&self) -> &[usize] {
        &self.islands
    }

    pub fn is_island(&self, i: usize) -> bool {
        self.offsets[i] == self.offsets[i + 1]
    }

    /// Stored `(column, weight)` pairs of row `i`, ascending by column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.cols[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn row_weights(&self, i: usize) -> &[T] {
        &self.vals[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Value of `w_ij`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> T {
        let nb = self.neighbors(i);
        match nb.binary_search(&j) {
            Ok(k) => self.vals[self.offsets[i] + k],
            Err(_) => T::zero(),
        }
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n).map(|i| self.row_weights(i).iter().copied().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n];
        for (&j, &w) in self.cols.iter().zip(&self.vals) {
            sums[j] += w;
        }
        sums
    }

    /// Divides every non-island row by its sum. Islands stay empty.
    pub fn row_standardize(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let range = self.offsets[i]..self.offsets[i + 1];
            let sum: T = self.vals[range.clone()].iter().copied().sum();
            if sum > T::zero() {
                for v in &mut out.vals[range] {
                    *v /= sum;
                }
            }
        }
        out.row_standardized = true;
        out
    }

    /// `W x`: the spatial lag of `x`. Islands get 0.
    pub fn lag(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len())?;
        Ok((0..self.n).map(|i| self.row(i).map(|(j, w)| w * x[j]).sum()).collect())
    }

    /// `W^T x`: for each location `k`, `sum_i w_ik x_i`.
    pub fn transpose_lag(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len())?;
        let mut out = vec![T::zero(); self.n];
        for (i, &xi) in x.iter().enumerate() {
            for (j, w) in self.row(i) {
                out[j] += w * xi;
            }
        }
        Ok(out)
    }

    /// Quadratic form `x^T W x`.
    pub fn quadratic_form(&self, x: &[T]) -> Result<T> {
        self.check_len(x.len())?;
        Ok((0..self.n).map(|i| x[i] * self.row(i).map(|(j, w)| w * x[j]).sum::<T>()).sum())
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, w)| (self.get(j, i) - w).abs() <= tol))
            && (0..self.n).all(|i| self.neighbors(i).iter().all(|&j| self.get(j, i) > T::zero()))
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut dense = vec![vec![T::zero(); self.n]; self.n];
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, w) in self.row(i) {
                row[j] = w;
            }
        }
        dense
    }

    /// Relabels locations so that new index `k` is old index `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        self.check_len(order.len())?;
        let mut inverse = vec![usize::MAX; self.n];
        for (new, &old) in order.iter().enumerate() {
            if old >= self.n {
                return Err(Error::IndexOutOfRange { index: old, n: self.n });
            }
            if inverse[old] != usize::MAX {
                return Err(Error::InvalidParameter(format!("index {old} repeated in permutation")));
            }
            inverse[old] = new;
        }
        let rows = order.iter().map(|&old| self.row(old).map(|(j, w)| (inverse[j], w)).collect()).collect();
        let mut out = Self::from_neighbor_lists(rows)?;
        out.row_standardized = self.row_standardized;
        Ok(out)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: len });
        }
        Ok(())
    }

    pub(crate) fn require_row_standardized(&self) -> Result<()> {
        if !self.row_standardized {
            return Err(Error::NotRowStandardized);
        }
        Ok(())
    }
}
