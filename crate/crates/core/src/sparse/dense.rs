use crate::error::{Error, Result};

/// Column-major block of equally long vectors, one per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Columns {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    /// Packs the given vectors; all must have the same length.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let nrows = cols.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * cols.len());
        for c in cols {
            if c.len() != nrows {
                return Err(Error::DimensionMismatch { expected: nrows, found: c.len() });
            }
            data.extend_from_slice(c);
        }
        Ok(Self { nrows, ncols: cols.len(), data })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.ncols).map(move |j| self.col(j))
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Dense Gaussian elimination with partial pivoting; a reference oracle for
/// small systems.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for row in &m {
        if row.len() != n {
            return Err(Error::NotSquare { nrows: n, ncols: row.len() });
        }
    }
    let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()).then(j.cmp(&i))).unwrap();
        if m[p][k].abs() <= f64::EPSILON * scale {
            return Err(Error::Singular { row: k });
        }
        m.swap(k, p);
        x.swap(k, p);
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot = &top[k];
        for (off, row) in rest.iter_mut().enumerate() {
            let l = row[k] / pivot[k];
            if l != 0.0 {
                for (r, v) in row[k..].iter_mut().zip(&pivot[k..]) {
                    *r -= l * v;
                }
                x[k + 1 + off] -= l * x[k];
            }
        }
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|c| m[i][c] * x[c]).sum();
        x[i] = (x[i] - s) / m[i][i];
    }
    Ok(x)
}
