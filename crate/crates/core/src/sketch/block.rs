use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::derive_seed;

use super::generalized::GeneralizedSparseEmbedding;

/// Block-diagonal stack of independent generalized sparse embeddings, one per
/// consecutive run of `w_block` input rows. The input is treated as padded
/// with zero rows up to a multiple of `w_block`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDiagonalEmbedding {
    n: usize,
    w_block: usize,
    blocks: Vec<GeneralizedSparseEmbedding>,
    t_block: usize,
    seed: u64,
}

impl BlockDiagonalEmbedding {
    pub fn new(
        n: usize,
        w_block: usize,
        q: usize,
        k_blocks: usize,
        v: usize,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || w_block == 0 {
            return Err(Error::param(
                "block embedding needs n >= 1 and w_block >= 1",
            ));
        }
        let n_blocks = n.div_ceil(w_block);
        let blocks = (0..n_blocks)
            .map(|b| {
                GeneralizedSparseEmbedding::with_params(
                    w_block,
                    q,
                    k_blocks,
                    v,
                    derive_seed(seed, b as u64),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let t_block = blocks[0].output_dim();
        Ok(BlockDiagonalEmbedding {
            n,
            w_block,
            blocks,
            t_block,
            seed,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.blocks.len() * self.t_block
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn w_block(&self) -> usize {
        self.w_block
    }

    pub fn block_output_dim(&self) -> usize {
        self.t_block
    }

    pub fn block(&self, b: usize) -> &GeneralizedSparseEmbedding {
        &self.blocks[b]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn block_rows(&self, b: usize) -> std::ops::Range<usize> {
        0..self.w_block.min(self.n - b * self.w_block)
    }

    pub(crate) fn apply_sparse(&self, a: &SparseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.output_dim(), a.n_cols());
        for (b, blk) in self.blocks.iter().enumerate() {
            blk.scatter_rows(
                a,
                b * self.w_block,
                self.block_rows(b),
                b * self.t_block,
                &mut out,
            );
        }
        out
    }

    pub(crate) fn apply_dense(&self, a: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.output_dim(), a.ncols());
        for (b, blk) in self.blocks.iter().enumerate() {
            blk.scatter_dense(
                a,
                b * self.w_block,
                self.block_rows(b),
                b * self.t_block,
                &mut out,
            );
        }
        out
    }
}
