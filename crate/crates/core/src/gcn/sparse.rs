use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Compressed sparse row matrix with `f64` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` entries; duplicates are summed and explicit
    /// zeros are kept.
    pub fn from_triplets(rows: usize, cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|(r, c, _)| *r >= rows || *c >= cols) {
            return Err(Error::Shape(format!("entry ({r}, {c}) outside a {rows}x{cols} matrix")));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let mut indptr = vec![0; rows + 1];
        let mut indices: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c));
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Ok(SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v)
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.rows).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn transpose(&self) -> Self {
        let t = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        SparseMatrix::from_triplets(self.cols, self.rows, t).expect("transposed entries in range")
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).map(|(_, v)| v).sum()).collect()
    }

    /// Divides every row by its sum; all-zero rows are left as they are.
    pub fn row_normalized(&self) -> Self {
        let sums = self.row_sums();
        let mut out = self.clone();
        for r in 0..self.rows {
            if sums[r] != 0.0 {
                for v in &mut out.values[self.indptr[r]..self.indptr[r + 1]] {
                    *v /= sums[r];
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut d = Array2::zeros((self.rows, self.cols));
        for (r, c, v) in self.triplets() {
            d[[r, c]] += v;
        }
        d
    }

    /// `self * dense`, row-parallel.
    pub fn dot(&self, dense: ArrayView2<f64>) -> Result<Array2<f64>> {
        if dense.nrows() != self.cols {
            return Err(Error::Shape(format!(
                "sparse {}x{} times dense {}x{}",
                self.rows,
                self.cols,
                dense.nrows(),
                dense.ncols()
            )));
        }
        let mut out = Array2::zeros((self.rows, dense.ncols()));
        out.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(r, mut o)| {
            for (c, v) in self.row(r) {
                o.scaled_add(v, &dense.row(c));
            }
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn duplicates_are_summed() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(1, 2, 1.0), (0, 0, 2.0), (1, 2, 0.5)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.to_dense(), array![[2.0, 0.0, 0.0], [0.0, 0.0, 1.5]]);
    }

    #[test]
    fn dot_matches_dense_product() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(0, 1, 2.0), (1, 0, -1.0), (1, 2, 3.0)]).unwrap();
        let x = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        assert_eq!(m.dot(x.view()).unwrap(), m.to_dense().dot(&x));
        assert_eq!(m.transpose().to_dense(), m.to_dense().t());
        assert!(m.dot(array![[1.0]].view()).is_err());
    }

    #[test]
    fn row_normalization() {
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 3.0)]).unwrap();
        let n = m.row_normalized();
        assert_eq!(n.row_sums(), vec![1.0, 0.0]);
        assert_eq!(n.get(0, 1), 0.75);
    }

    #[test]
    fn out_of_range_entry() {
        assert!(SparseMatrix::from_triplets(1, 1, vec![(0, 1, 1.0)]).is_err());
    }
}
