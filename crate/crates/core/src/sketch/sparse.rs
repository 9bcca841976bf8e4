use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::{stream, stream_rng};

#[cfg(any(test, feature = "op-count"))]
thread_local! {
    /// Multiply-adds performed by `SparseEmbedding::scatter_rows` on this thread.
    pub(crate) static SCATTER_OPS: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
}

/// CountSketch-style sparse embedding `Phi * D`: row `i` of the input lands in
/// output row `bucket[i]` with sign `sign[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseEmbedding {
    n: usize,
    t: usize,
    bucket: Vec<usize>,
    sign: Vec<f64>,
    seed: u64,
}

impl SparseEmbedding {
    pub fn new(n: usize, t: usize, seed: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::param("sparse embedding needs t >= 1"));
        }
        if n == 0 {
            return Err(Error::param("sparse embedding needs n >= 1"));
        }
        let mut brng = stream_rng(seed, stream::SPARSE_BUCKET);
        let mut srng = stream_rng(seed, stream::SPARSE_SIGN);
        let bucket = (0..n).map(|_| brng.random_range(0..t)).collect();
        let sign = (0..n)
            .map(|_| if srng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        Ok(SparseEmbedding {
            n,
            t,
            bucket,
            sign,
            seed,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.t
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bucket(&self) -> &[usize] {
        &self.bucket
    }

    pub fn sign(&self) -> &[f64] {
        &self.sign
    }

    /// Accumulates `S * A[rows]` into `out` (`t x d`, column-major), one
    /// multiply-add per stored nonzero.
    pub(crate) fn scatter_rows(
        &self,
        a: &SparseMatrix,
        rows: std::ops::Range<usize>,
        out: &mut DenseMatrix,
    ) {
        let t = self.t;
        let data = out.as_mut_slice();
        for i in rows {
            let (b, s) = (self.bucket[i], self.sign[i]);
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                data[j * t + b] += s * v;
            }
            #[cfg(any(test, feature = "op-count"))]
            SCATTER_OPS.with(|c| c.set(c.get() + cols.len() as u64));
        }
    }

    pub(crate) fn apply_sparse(&self, a: &SparseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.t, a.n_cols());
        self.scatter_rows(a, 0..a.n_rows(), &mut out);
        out
    }

    pub(crate) fn apply_dense(&self, a: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.t, a.ncols());
        for (src, mut dst) in a.column_iter().zip(out.column_iter_mut()) {
            for i in 0..self.n {
                dst[self.bucket[i]] += self.sign[i] * src[i];
            }
        }
        out
    }
}
