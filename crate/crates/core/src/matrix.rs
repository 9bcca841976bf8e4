//! Matrix containers.
//!
//! Sparse inputs are held in compressed-row form; everything dense (sketched
//! products, bases, right-hand sides) is a column-major [`DenseMatrix`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column-major dense matrix.
pub type DenseMatrix = nalgebra::DMatrix<f64>;

/// Numerical tolerances shared by the dense decompositions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular values at or below `rank_rel_tol * sigma_1` are treated as zero.
    pub rank_rel_tol: f64,
    pub ortho_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel_tol: 1e-10,
            ortho_tol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(rank_rel_tol: f64, ortho_tol: f64) -> Result<Self> {
        for (name, v) in [("rank_rel_tol", rank_rel_tol), ("ortho_tol", ortho_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(Tolerances {
            rank_rel_tol,
            ortho_tol,
        })
    }
}

/// Compressed sparse row matrix.
///
/// Canonical form: column indices strictly increasing within each row and no
/// stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, checking every structural invariant.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if row_offsets[0] != 0 || *row_offsets.last().unwrap() != col_indices.len() {
            return Err(Error::InvalidMatrix(
                "row_offsets must start at 0 and end at nnz".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(Error::InvalidMatrix(
                "col_indices and values differ in length".into(),
            ));
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::InvalidMatrix(
                    "row_offsets must be non-decreasing".into(),
                ));
            }
            let cols = &col_indices[lo..hi];
            if cols.iter().any(|&c| c >= n_cols) {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has a column index out of range"
                )));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} column indices are not strictly increasing"
                )));
            }
        }
        if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidMatrix(
                "stored values must be finite and nonzero".into(),
            ));
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a canonical matrix from (row, col, value) triplets: duplicates are
    /// summed, zeros dropped, rows sorted.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) outside a {n_rows}x{n_cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidMatrix(format!(
                    "non-finite value at ({i}, {j})"
                )));
            }
            entries.push((i, j, v));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut k = 0;
        while k < entries.len() {
            let (i, j, mut v) = entries[k];
            k += 1;
            while k < entries.len() && entries[k].0 == i && entries[k].1 == j {
                v += entries[k].2;
                k += 1;
            }
            if v != 0.0 {
                row_offsets[i + 1] += 1;
                col_indices.push(j);
                values.push(v);
            }
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut row_offsets = Vec::with_capacity(a.nrows() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let v = a[(i, j)];
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        SparseMatrix {
            n_rows: a.nrows(),
            n_cols: a.ncols(),
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
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
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Iterates stored entries as (row, col, value).
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            out[(i, j)] = v;
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // rows are visited in increasing order, so each output row stays sorted
        for (i, j, v) in self.triplets() {
            let pos = next[j];
            col_indices[pos] = i;
            values[pos] = v;
            next[j] += 1;
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    /// `A * x` for a dense `x`.
    pub fn mul_dense(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.nrows() != self.n_cols {
            return Err(Error::mismatch("sparse * dense", self.n_cols, x.nrows()));
        }
        let mut out = DenseMatrix::zeros(self.n_rows, x.ncols());
        for c in 0..x.ncols() {
            let xc = x.column(c);
            for i in 0..self.n_rows {
                let (cols, vals) = self.row(i);
                let mut acc = 0.0;
                for (&j, &v) in cols.iter().zip(vals) {
                    acc += v * xc[j];
                }
                out[(i, c)] = acc;
            }
        }
        Ok(out)
    }

    /// `A^T * y` for a dense `y`.
    pub fn tr_mul_dense(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        if y.nrows() != self.n_rows {
            return Err(Error::mismatch("sparse^T * dense", self.n_rows, y.nrows()));
        }
        let mut out = DenseMatrix::zeros(self.n_cols, y.ncols());
        for c in 0..y.ncols() {
            let yc = y.column(c);
            let mut oc = out.column_mut(c);
            for i in 0..self.n_rows {
                let yi = yc[i];
                if yi == 0.0 {
                    continue;
                }
                let (cols, vals) = self.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    oc[j] += v * yi;
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Scales every entry by `c` (`c = 0` yields the empty pattern).
    pub fn scaled(&self, c: f64) -> SparseMatrix {
        if c == 0.0 {
            return SparseMatrix::zeros(self.n_rows, self.n_cols);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Dense copy of the listed rows, each multiplied by its weight.
    pub fn weighted_rows(&self, rows: &[(usize, f64)]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows.len(), self.n_cols);
        for (m, &(i, w)) in rows.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out[(m, j)] = w * v;
            }
        }
        out
    }
}

/// Dense copy of the listed rows of a dense matrix, each multiplied by its weight.
pub fn weighted_dense_rows(b: &DenseMatrix, rows: &[(usize, f64)]) -> DenseMatrix {
    DenseMatrix::from_fn(rows.len(), b.ncols(), |m, j| rows[m].1 * b[(rows[m].0, j)])
}
