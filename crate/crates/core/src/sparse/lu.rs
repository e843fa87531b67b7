//! Banded LU with partial (row) pivoting.
//!
//! Pivoting is restricted to the `kl` rows below the diagonal, so the upper
//! factor has bandwidth `kl + ku`. Row interchanges are recorded per step and
//! replayed in the same order during the forward sweep; multipliers stay in
//! the positions where they were computed.

use super::csr::CsrMatrix;
use super::dense::Columns;
use crate::error::{Error, Result};

/// Reusable factorization `P A = L U` of a banded square matrix.
#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    kl: usize,
    /// Upper bandwidth of `U` (`kl + ku` of the input).
    ku_fill: usize,
    /// `lower[k * kl + (i - k - 1)]` is the multiplier of row `i` at step `k`.
    lower: Vec<f64>,
    /// `upper[i * (ku_fill + 1) + (c - i)]` is `U[i][c]`.
    upper: Vec<f64>,
    pivots: Vec<usize>,
}

impl Factorization {
    /// Factors `a`. Fails with [`Error::Singular`] naming the first step whose
    /// best pivot is below `EPSILON * max|a|`.
    pub fn factorize(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::NotSquare { nrows: n, ncols: a.ncols() });
        }
        let (kl, ku) = a.bandwidths();
        let ku_fill = kl + ku;
        let w = kl + ku_fill + 1;
        let idx = |i: usize, c: usize| i * w + (c + kl - i);

        let mut band = vec![0.0; n * w];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                band[idx(i, c)] = v;
            }
        }
        let threshold = f64::EPSILON * a.max_abs();
        let mut pivots = vec![0usize; n];

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku_fill).min(n - 1);
            let mut p = k;
            let mut best = band[idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = band[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > threshold) {
                return Err(Error::Singular { row: k });
            }
            pivots[k] = p;
            if p != k {
                for c in k..=last_col {
                    band.swap(idx(k, c), idx(p, c));
                }
            }
            let diag = band[idx(k, k)];
            for i in k + 1..=last_row {
                let l = band[idx(i, k)] / diag;
                band[idx(i, k)] = l;
                if l != 0.0 {
                    for c in k + 1..=last_col {
                        band[idx(i, c)] -= l * band[idx(k, c)];
                    }
                }
            }
        }

        let mut lower = vec![0.0; n * kl];
        let mut upper = vec![0.0; n * (ku_fill + 1)];
        for k in 0..n {
            for i in k + 1..=(k + kl).min(n - 1) {
                lower[k * kl + (i - k - 1)] = band[idx(i, k)];
            }
            for c in k..=(k + ku_fill).min(n - 1) {
                upper[k * (ku_fill + 1) + (c - k)] = band[idx(k, c)];
            }
        }
        Ok(Self { n, kl, ku_fill, lower, upper, pivots })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.len() });
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    /// Overwrites `x` (holding `b`) with the solution. Panics on length mismatch.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let (n, kl) = (self.n, self.kl);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                let m = (n - 1 - k).min(kl);
                let col = &self.lower[k * kl..k * kl + m];
                for (xi, &l) in x[k + 1..k + 1 + m].iter_mut().zip(col) {
                    *xi -= l * xk;
                }
            }
        }
        let wu = self.ku_fill + 1;
        for i in (0..n).rev() {
            let m = (n - 1 - i).min(self.ku_fill);
            let row = &self.upper[i * wu..i * wu + m + 1];
            let s: f64 = row[1..].iter().zip(&x[i + 1..i + 1 + m]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[0];
        }
    }

    /// Solves every column of `b`; each column is bit-identical to [`solve`](Self::solve).
    pub fn solve_many(&self, b: &Columns) -> Result<Columns> {
        if b.nrows() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.nrows() });
        }
        let mut x = b.clone();
        for j in 0..x.ncols() {
            self.solve_in_place(x.col_mut(j));
        }
        Ok(x)
    }
}
