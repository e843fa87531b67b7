use std::io::Write;

use crate::error::{Error, Result};

/// Compressed sparse row matrix.
///
/// Invariants: `row_offsets.len() == nrows + 1`, offsets non-decreasing and
/// ending at `values.len()`; columns strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates
    /// in input order.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(row, col, _) in triplets {
            if row >= nrows || col >= ncols {
                return Err(Error::IndexOutOfRange { row, col, nrows, ncols });
            }
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (r, c, v) = triplets[k];
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Ok(Self { nrows, ncols, row_offsets, col_indices, values })
    }

    /// Matrix with no stored entries.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, row_offsets: vec![0; nrows + 1], col_indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self { nrows: n, ncols: n, row_offsets: (0..=n).collect(), col_indices: (0..n).collect(), values: vec![1.0; n] }
    }

    /// Stores the nonzero entries of a dense row-major matrix.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch { expected: ncols, found: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Stored value at `(i, j)`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: x.len() });
        }
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without allocation. Panics on length mismatch.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `x^T A x`. Panics on length mismatch.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(self.nrows, self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                let ax: f64 = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
                x[i] * ax
            })
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + alpha * other` over the union of both sparsity patterns.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix) -> Result<Self> {
        if self.nrows != other.nrows {
            return Err(Error::DimensionMismatch { expected: self.nrows, found: other.nrows });
        }
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: other.ncols });
        }
        let mut row_offsets = Vec::with_capacity(self.nrows + 1);
        let mut col_indices = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(self.nnz().max(other.nnz()));
        row_offsets.push(0);
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let next_a = ca.get(p).copied().unwrap_or(usize::MAX);
                let next_b = cb.get(q).copied().unwrap_or(usize::MAX);
                if next_a < next_b {
                    col_indices.push(next_a);
                    values.push(va[p]);
                    p += 1;
                } else if next_b < next_a {
                    col_indices.push(next_b);
                    values.push(alpha * vb[q]);
                    q += 1;
                } else {
                    col_indices.push(next_a);
                    values.push(va[p] + alpha * vb[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self { nrows: self.nrows, ncols: self.ncols, row_offsets, col_indices, values })
    }

    pub fn add(&self, other: &CsrMatrix) -> Result<Self> {
        self.add_scaled(1.0, other)
    }

    /// Keeps the pattern and replaces each value by `f(row, col, value)`.
    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows {
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                out.values[k] = f(i, self.col_indices[k], self.values[k]);
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows).map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest absolute stored value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Lower and upper bandwidth of the stored pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.nrows {
            for &c in self.row(i).0 {
                if c < i {
                    kl = kl.max(i - c);
                } else {
                    ku = ku.max(c - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn transpose(&self) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                triplets.push((c, i, v));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, &triplets).expect("indices in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        out
    }

    /// Coordinate listing, one `row col value` line per stored entry.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                writeln!(out, "{i} {c} {v:.17e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
    }

    #[test]
    fn empty_triplets() {
        let a = CsrMatrix::from_triplets(2, 2, &[]).unwrap();
        assert_eq!(a.nnz(), 0);
        assert_eq!(a.row_offsets(), &[0, 0, 0]);
    }

    #[test]
    fn entries_sorted_per_row() {
        let a = CsrMatrix::from_triplets(2, 2, &[(1, 0, 5.0), (0, 1, 7.0)]).unwrap();
        assert_eq!(a.row_offsets(), &[0, 1, 2]);
        assert_eq!(a.col_indices(), &[1, 0]);
        assert_eq!(a.values(), &[7.0, 5.0]);
        let b = CsrMatrix::from_triplets(1, 3, &[(0, 2, 1.0), (0, 0, 2.0), (0, 1, 3.0)]).unwrap();
        assert_eq!(b.col_indices(), &[0, 1, 2]);
    }

    #[test]
    fn out_of_range_triplet() {
        let err = CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { row: 2, .. }));
        assert!(CsrMatrix::from_triplets(2, 2, &[(0, 5, 1.0)]).is_err());
    }

    #[test]
    fn spmv_examples() {
        let x = [1.5, -2.0, 4.0];
        assert_eq!(CsrMatrix::identity(3).spmv(&x).unwrap(), x.to_vec());
        assert_eq!(CsrMatrix::zeros(3, 3).spmv(&x).unwrap(), vec![0.0; 3]);
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(a.spmv(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        assert!(a.spmv(&[1.0]).is_err());
    }

    #[test]
    fn add_and_scale() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let b = CsrMatrix::from_dense(&[vec![0.0, 3.0], vec![1.0, 1.0]]).unwrap();
        let c = a.add_scaled(2.0, &b).unwrap();
        assert_eq!(c.to_dense(), vec![vec![1.0, 6.0], vec![2.0, 4.0]]);
        assert_eq!(a.scale(-1.0).get(1, 1), -2.0);
        assert_eq!(a.bandwidths(), (0, 0));
        assert_eq!(b.bandwidths(), (1, 1));
        assert_eq!(b.transpose().to_dense(), vec![vec![0.0, 1.0], vec![3.0, 1.0]]);
        assert_eq!(b.norm_inf(), 3.0);
    }

    #[test]
    fn dump_coordinates() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let mut buf = Vec::new();
        a.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("0 0 "));
    }
}
