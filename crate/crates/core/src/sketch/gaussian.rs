use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::{stream, stream_rng};

/// Dense Johnson-Lindenstrauss matrix with i.i.d. `N(0, 1/rows)` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianJl {
    entries: DenseMatrix,
    seed: u64,
}

impl GaussianJl {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("Gaussian JL needs rows >= 1 and cols >= 1"));
        }
        let mut rng = stream_rng(seed, stream::GAUSSIAN);
        let scale = 1.0 / (rows as f64).sqrt();
        // column-major fill order is part of the determinism contract
        let entries = DenseMatrix::from_fn(rows, cols, |_, _| {
            scale * rng.sample::<f64, _>(StandardNormal)
        });
        Ok(GaussianJl { entries, seed })
    }

    pub fn input_dim(&self) -> usize {
        self.entries.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub(crate) fn apply_sparse(&self, a: &SparseMatrix) -> DenseMatrix {
        // (A^T G^T)^T
        a.tr_mul_dense(&self.entries.transpose())
            .expect("dimensions checked by caller")
            .transpose()
    }

    pub(crate) fn apply_dense(&self, a: &DenseMatrix) -> DenseMatrix {
        &self.entries * a
    }
}
