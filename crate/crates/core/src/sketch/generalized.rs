use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::{stream, stream_rng};

/// Block-structured sparse embedding.
///
/// Rows are hashed into `q` outer buckets. Inside each bucket sits a stack of
/// `k_blocks` independent sparse embeddings into `v` rows, scaled by
/// `1/sqrt(k_blocks)`. Output coordinates of bucket `b` occupy the disjoint
/// range `b*k_blocks*v .. (b+1)*k_blocks*v`, which realizes the row permutation
/// that groups each bucket's rows without ever materializing it.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedSparseEmbedding {
    n: usize,
    q: usize,
    k_blocks: usize,
    v: usize,
    outer_bucket: Vec<usize>,
    /// `n * k_blocks`, row-major by input row.
    inner_bucket: Vec<usize>,
    inner_sign: Vec<f64>,
    scale: f64,
    seed: u64,
    dense_fallback: bool,
}

impl GeneralizedSparseEmbedding {
    pub fn with_params(n: usize, q: usize, k_blocks: usize, v: usize, seed: u64) -> Result<Self> {
        if n == 0 || q == 0 || k_blocks == 0 || v == 0 {
            return Err(Error::param(format!(
                "generalized embedding needs positive n, q, k_blocks, v (got {n}, {q}, {k_blocks}, {v})"
            )));
        }
        let mut orng = stream_rng(seed, stream::GEN_OUTER);
        let mut irng = stream_rng(seed, stream::GEN_INNER);
        let outer_bucket = (0..n).map(|_| orng.random_range(0..q)).collect();
        let mut inner_bucket = Vec::with_capacity(n * k_blocks);
        let mut inner_sign = Vec::with_capacity(n * k_blocks);
        for _ in 0..n * k_blocks {
            inner_bucket.push(irng.random_range(0..v));
            inner_sign.push(if irng.random::<bool>() { 1.0 } else { -1.0 });
        }
        let t = q * k_blocks * v;
        if t > n {
            log::debug!("generalized embedding output dim {t} exceeds input dim {n}");
        }
        Ok(GeneralizedSparseEmbedding {
            n,
            q,
            k_blocks,
            v,
            outer_bucket,
            inner_bucket,
            inner_sign,
            scale: 1.0 / (k_blocks as f64).sqrt(),
            seed,
            dense_fallback: t > n,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.q * self.k_blocks * self.v
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k_blocks(&self) -> usize {
        self.k_blocks
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn outer_bucket(&self) -> &[usize] {
        &self.outer_bucket
    }

    /// Set when the output dimension exceeds the input dimension; the operator
    /// is still a valid embedding, just not a compression.
    pub fn dense_fallback(&self) -> bool {
        self.dense_fallback
    }

    /// Output rows and coefficients hit by input row `i` (exactly `k_blocks` of them).
    #[inline]
    pub(crate) fn targets(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let base = self.outer_bucket[i] * self.k_blocks * self.v;
        (0..self.k_blocks).map(move |m| {
            let idx = i * self.k_blocks + m;
            (
                base + m * self.v + self.inner_bucket[idx],
                self.scale * self.inner_sign[idx],
            )
        })
    }

    /// Accumulates `S * A[rows]` into `out`, shifted down by `offset` output rows
    /// and reading input rows at `row_base + local`.
    pub(crate) fn scatter_rows(
        &self,
        a: &SparseMatrix,
        row_base: usize,
        local_rows: std::ops::Range<usize>,
        offset: usize,
        out: &mut DenseMatrix,
    ) {
        let ld = out.nrows();
        let data = out.as_mut_slice();
        for local in local_rows {
            let (cols, vals) = a.row(row_base + local);
            for (r, c) in self.targets(local) {
                for (&j, &x) in cols.iter().zip(vals) {
                    data[j * ld + offset + r] += c * x;
                }
            }
        }
    }

    pub(crate) fn apply_sparse(&self, a: &SparseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.output_dim(), a.n_cols());
        self.scatter_rows(a, 0, 0..self.n, 0, &mut out);
        out
    }

    pub(crate) fn scatter_dense(
        &self,
        a: &DenseMatrix,
        row_base: usize,
        local_rows: std::ops::Range<usize>,
        offset: usize,
        out: &mut DenseMatrix,
    ) {
        for (src, mut dst) in a.column_iter().zip(out.column_iter_mut()) {
            for local in local_rows.clone() {
                let x = src[row_base + local];
                if x == 0.0 {
                    continue;
                }
                for (r, c) in self.targets(local) {
                    dst[offset + r] += c * x;
                }
            }
        }
    }

    pub(crate) fn apply_dense(&self, a: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.output_dim(), a.ncols());
        self.scatter_dense(a, 0, 0..self.n, 0, &mut out);
        out
    }
}
