//! Sketching operators.
//!
//! Every family stores its own randomness, derived from an explicit seed, and
//! is applied from the left (`S * A`) without materializing `S`. The JSON
//! [`SketchDescriptor`] records only family, dimensions and seed; the random
//! state is regenerated on load.

mod block;
pub mod dims;
mod gaussian;
mod generalized;
mod sampler;
mod sparse;
mod srht;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use block::BlockDiagonalEmbedding;
pub use dims::{default_sparse_dim, generalized_params, srht_dim, GeneralizedParams};
pub use gaussian::GaussianJl;
pub use generalized::GeneralizedSparseEmbedding;
pub use sampler::LeverageSampler;
pub use sparse::SparseEmbedding;
pub use srht::{fwht, SrhtOperator};

#[cfg(any(test, feature = "op-count"))]
pub(crate) use sparse::SCATTER_OPS;

/// Multiply-adds the sparse embedding has performed on this thread since the
/// last reset. Only compiled with the `op-count` feature.
#[cfg(any(test, feature = "op-count"))]
pub fn scatter_op_count() -> u64 {
    SCATTER_OPS.with(|c| c.get())
}

#[cfg(any(test, feature = "op-count"))]
pub fn reset_scatter_op_count() {
    SCATTER_OPS.with(|c| c.set(0));
}

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::derive_seed;

/// Borrowed sparse or dense input to a sketch.
#[derive(Clone, Copy, Debug)]
pub enum MatrixRef<'a> {
    Sparse(&'a SparseMatrix),
    Dense(&'a DenseMatrix),
}

impl MatrixRef<'_> {
    pub fn n_rows(&self) -> usize {
        match self {
            MatrixRef::Sparse(a) => a.n_rows(),
            MatrixRef::Dense(a) => a.nrows(),
        }
    }

    pub fn n_cols(&self) -> usize {
        match self {
            MatrixRef::Sparse(a) => a.n_cols(),
            MatrixRef::Dense(a) => a.ncols(),
        }
    }
}

impl<'a> From<&'a SparseMatrix> for MatrixRef<'a> {
    fn from(a: &'a SparseMatrix) -> Self {
        MatrixRef::Sparse(a)
    }
}

impl<'a> From<&'a DenseMatrix> for MatrixRef<'a> {
    fn from(a: &'a DenseMatrix) -> Self {
        MatrixRef::Dense(a)
    }
}

/// A sketching matrix `S` of shape `output_dim x input_dim`.
#[derive(Clone, Debug, PartialEq)]
pub enum SketchOperator {
    Sparse(SparseEmbedding),
    Generalized(GeneralizedSparseEmbedding),
    Srht(SrhtOperator),
    Sampler(LeverageSampler),
    Gaussian(GaussianJl),
    BlockDiagonal(BlockDiagonalEmbedding),
    /// `outer * inner`.
    Composed {
        outer: Box<SketchOperator>,
        inner: Box<SketchOperator>,
    },
}

/// CountSketch-style embedding into `t` rows.
pub fn make_sparse_embedding(n: usize, t: usize, seed: u64) -> Result<SketchOperator> {
    Ok(SketchOperator::Sparse(SparseEmbedding::new(n, t, seed)?))
}

/// Generalized sparse embedding sized from `(r, eps, delta)` through
/// [`generalized_params`]. Check `dense_fallback()` on the result when the
/// output dimension may exceed `n`.
pub fn make_generalized_sparse_embedding(
    n: usize,
    r: usize,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<SketchOperator> {
    if !(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!(
            "eps and delta must lie in (0, 1), got {eps}, {delta}"
        )));
    }
    let p = generalized_params(r, eps, delta);
    Ok(SketchOperator::Generalized(
        GeneralizedSparseEmbedding::with_params(n, p.q, p.k_blocks, p.v, seed)?,
    ))
}

pub fn make_srht(n: usize, t: usize, seed: u64) -> Result<SketchOperator> {
    Ok(SketchOperator::Srht(SrhtOperator::new(n, t, seed)?))
}

/// The all-rows SRHT: an exact isometry, the reference "no-loss" sketch.
pub fn make_full_srht(n: usize, seed: u64) -> Result<SketchOperator> {
    Ok(SketchOperator::Srht(SrhtOperator::all_rows(n, seed)?))
}

pub fn make_leverage_sampler(probs: &[f64], t: usize, seed: u64) -> Result<SketchOperator> {
    Ok(SketchOperator::Sampler(LeverageSampler::new(
        probs, t, seed,
    )?))
}

pub fn make_gaussian_jl(rows: usize, cols: usize, seed: u64) -> Result<SketchOperator> {
    Ok(SketchOperator::Gaussian(GaussianJl::new(rows, cols, seed)?))
}

/// SRHT applied after a sparse embedding, the fast subspace embedding used by
/// the preconditioner, leverage and low-rank pipelines. A stage whose target
/// dimension reaches its input dimension is dropped since it cannot reduce
/// anything; if both are dropped the result is the exact all-rows SRHT.
pub fn make_two_stage(
    n: usize,
    t_sparse: usize,
    t_srht: usize,
    seed: u64,
) -> Result<SketchOperator> {
    let sparse = (t_sparse < n)
        .then(|| make_sparse_embedding(n, t_sparse, derive_seed(seed, 1)))
        .transpose()?;
    let m = sparse.as_ref().map_or(n, SketchOperator::output_dim);
    let srht = (t_srht < m)
        .then(|| make_srht(m, t_srht, derive_seed(seed, 2)))
        .transpose()?;
    match (srht, sparse) {
        (Some(f), Some(s)) => compose(f, s),
        (Some(f), None) => Ok(f),
        (None, Some(s)) => Ok(s),
        (None, None) => make_full_srht(n, derive_seed(seed, 2)),
    }
}

/// `outer * inner`; requires `outer.input_dim() == inner.output_dim()`.
pub fn compose(outer: SketchOperator, inner: SketchOperator) -> Result<SketchOperator> {
    if outer.input_dim() != inner.output_dim() {
        return Err(Error::mismatch(
            "compose",
            inner.output_dim(),
            outer.input_dim(),
        ));
    }
    Ok(SketchOperator::Composed {
        outer: Box::new(outer),
        inner: Box::new(inner),
    })
}

impl SketchOperator {
    pub fn input_dim(&self) -> usize {
        match self {
            SketchOperator::Sparse(s) => s.input_dim(),
            SketchOperator::Generalized(s) => s.input_dim(),
            SketchOperator::Srht(s) => s.input_dim(),
            SketchOperator::Sampler(s) => s.input_dim(),
            SketchOperator::Gaussian(s) => s.input_dim(),
            SketchOperator::BlockDiagonal(s) => s.input_dim(),
            SketchOperator::Composed { inner, .. } => inner.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            SketchOperator::Sparse(s) => s.output_dim(),
            SketchOperator::Generalized(s) => s.output_dim(),
            SketchOperator::Srht(s) => s.output_dim(),
            SketchOperator::Sampler(s) => s.output_dim(),
            SketchOperator::Gaussian(s) => s.output_dim(),
            SketchOperator::BlockDiagonal(s) => s.output_dim(),
            SketchOperator::Composed { outer, .. } => outer.output_dim(),
        }
    }

    /// Seed of the operator (the innermost one for compositions).
    pub fn seed(&self) -> u64 {
        match self {
            SketchOperator::Sparse(s) => s.seed(),
            SketchOperator::Generalized(s) => s.seed(),
            SketchOperator::Srht(s) => s.seed(),
            SketchOperator::Sampler(s) => s.seed(),
            SketchOperator::Gaussian(s) => s.seed(),
            SketchOperator::BlockDiagonal(s) => s.seed(),
            SketchOperator::Composed { inner, .. } => inner.seed(),
        }
    }

    /// `S * A`.
    pub fn apply_left<'a>(&self, a: impl Into<MatrixRef<'a>>) -> Result<DenseMatrix> {
        let a = a.into();
        if a.n_rows() != self.input_dim() {
            return Err(Error::mismatch("apply_left", self.input_dim(), a.n_rows()));
        }
        Ok(match (self, a) {
            (SketchOperator::Sparse(s), MatrixRef::Sparse(m)) => s.apply_sparse(m),
            (SketchOperator::Sparse(s), MatrixRef::Dense(m)) => s.apply_dense(m),
            (SketchOperator::Generalized(s), MatrixRef::Sparse(m)) => s.apply_sparse(m),
            (SketchOperator::Generalized(s), MatrixRef::Dense(m)) => s.apply_dense(m),
            (SketchOperator::Srht(s), MatrixRef::Sparse(m)) => s.apply_dense(&m.to_dense()),
            (SketchOperator::Srht(s), MatrixRef::Dense(m)) => s.apply_dense(m),
            (SketchOperator::Sampler(s), MatrixRef::Sparse(m)) => s.apply_sparse(m),
            (SketchOperator::Sampler(s), MatrixRef::Dense(m)) => s.apply_dense(m),
            (SketchOperator::Gaussian(s), MatrixRef::Sparse(m)) => s.apply_sparse(m),
            (SketchOperator::Gaussian(s), MatrixRef::Dense(m)) => s.apply_dense(m),
            (SketchOperator::BlockDiagonal(s), MatrixRef::Sparse(m)) => s.apply_sparse(m),
            (SketchOperator::BlockDiagonal(s), MatrixRef::Dense(m)) => s.apply_dense(m),
            (SketchOperator::Composed { outer, inner }, m) => {
                let mid = inner.apply_left(m)?;
                outer.apply_left(&mid)?
            }
        })
    }

    /// `S * A` with the rows of a sparse `A` split across `workers` threads,
    /// each scattering into a private accumulator; the partial results are
    /// summed. Families without a row-scatter kernel fall back to
    /// [`apply_left`](Self::apply_left).
    pub fn apply_left_parallel(&self, a: &SparseMatrix, workers: usize) -> Result<DenseMatrix> {
        if a.n_rows() != self.input_dim() {
            return Err(Error::mismatch(
                "apply_left_parallel",
                self.input_dim(),
                a.n_rows(),
            ));
        }
        let workers = workers.max(1);
        let n = a.n_rows();
        let chunk = n.div_ceil(workers).max(1);
        let ranges: Vec<std::ops::Range<usize>> = (0..n)
            .step_by(chunk)
            .map(|lo| lo..(lo + chunk).min(n))
            .collect();
        let t = self.output_dim();
        let partial = |range: std::ops::Range<usize>| -> DenseMatrix {
            let mut out = DenseMatrix::zeros(t, a.n_cols());
            match self {
                SketchOperator::Sparse(s) => s.scatter_rows(a, range, &mut out),
                SketchOperator::Generalized(s) => s.scatter_rows(a, 0, range, 0, &mut out),
                _ => unreachable!(),
            }
            out
        };
        match self {
            SketchOperator::Sparse(_) | SketchOperator::Generalized(_) => Ok(ranges
                .into_par_iter()
                .map(partial)
                .reduce(|| DenseMatrix::zeros(t, a.n_cols()), |x, y| x + y)),
            _ => self.apply_left(a),
        }
    }

    /// `A * S^T` (the sketch applied to the rows of `A`).
    pub fn apply_right<'a>(&self, a: impl Into<MatrixRef<'a>>) -> Result<DenseMatrix> {
        let a = a.into();
        if a.n_cols() != self.input_dim() {
            return Err(Error::mismatch("apply_right", self.input_dim(), a.n_cols()));
        }
        let out = match a {
            MatrixRef::Sparse(m) => self.apply_left(&m.transpose())?,
            MatrixRef::Dense(m) => self.apply_left(&m.transpose())?,
        };
        Ok(out.transpose())
    }

    /// Dense `output_dim x input_dim` matrix of the operator.
    pub fn materialize(&self) -> DenseMatrix {
        let n = self.input_dim();
        self.apply_left(&DenseMatrix::identity(n, n))
            .expect("identity has matching dimensions")
    }

    pub fn descriptor(&self) -> SketchDescriptor {
        match self {
            SketchOperator::Sparse(s) => SketchDescriptor::Sparse {
                n: s.input_dim(),
                t: s.output_dim(),
                seed: s.seed(),
            },
            SketchOperator::Generalized(s) => SketchDescriptor::Generalized {
                n: s.input_dim(),
                q: s.q(),
                k_blocks: s.k_blocks(),
                v: s.v(),
                seed: s.seed(),
            },
            SketchOperator::Srht(s) => SketchDescriptor::Srht {
                n: s.input_dim(),
                t: s.output_dim(),
                seed: s.seed(),
                all_rows: s.is_all_rows(),
            },
            SketchOperator::Sampler(s) => SketchDescriptor::Sampler {
                probs: s.probs().to_vec(),
                t: s.output_dim(),
                seed: s.seed(),
            },
            SketchOperator::Gaussian(s) => SketchDescriptor::Gaussian {
                rows: s.output_dim(),
                cols: s.input_dim(),
                seed: s.seed(),
            },
            SketchOperator::BlockDiagonal(s) => {
                let b = s.block(0);
                SketchDescriptor::BlockDiagonal {
                    n: s.input_dim(),
                    w_block: s.w_block(),
                    q: b.q(),
                    k_blocks: b.k_blocks(),
                    v: b.v(),
                    seed: s.seed(),
                }
            }
            SketchOperator::Composed { outer, inner } => SketchDescriptor::Composed {
                outer: Box::new(outer.descriptor()),
                inner: Box::new(inner.descriptor()),
            },
        }
    }

    pub fn from_descriptor(d: &SketchDescriptor) -> Result<Self> {
        Ok(match d {
            SketchDescriptor::Sparse { n, t, seed } => make_sparse_embedding(*n, *t, *seed)?,
            SketchDescriptor::Generalized {
                n,
                q,
                k_blocks,
                v,
                seed,
            } => SketchOperator::Generalized(GeneralizedSparseEmbedding::with_params(
                *n, *q, *k_blocks, *v, *seed,
            )?),
            SketchDescriptor::Srht {
                n,
                t,
                seed,
                all_rows,
            } => {
                if *all_rows {
                    make_full_srht(*n, *seed)?
                } else {
                    make_srht(*n, *t, *seed)?
                }
            }
            SketchDescriptor::Sampler { probs, t, seed } => {
                make_leverage_sampler(probs, *t, *seed)?
            }
            SketchDescriptor::Gaussian { rows, cols, seed } => {
                make_gaussian_jl(*rows, *cols, *seed)?
            }
            SketchDescriptor::BlockDiagonal {
                n,
                w_block,
                q,
                k_blocks,
                v,
                seed,
            } => SketchOperator::BlockDiagonal(BlockDiagonalEmbedding::new(
                *n, *w_block, *q, *k_blocks, *v, *seed,
            )?),
            SketchDescriptor::Composed { outer, inner } => {
                compose(Self::from_descriptor(outer)?, Self::from_descriptor(inner)?)?
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.descriptor())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_descriptor(&serde_json::from_str(s)?)
    }
}

/// Serializable recipe for a [`SketchOperator`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SketchDescriptor {
    Sparse {
        n: usize,
        t: usize,
        seed: u64,
    },
    Generalized {
        n: usize,
        q: usize,
        k_blocks: usize,
        v: usize,
        seed: u64,
    },
    Srht {
        n: usize,
        t: usize,
        seed: u64,
        all_rows: bool,
    },
    /// The probabilities are input data, not randomness, so they are stored.
    Sampler {
        probs: Vec<f64>,
        t: usize,
        seed: u64,
    },
    Gaussian {
        rows: usize,
        cols: usize,
        seed: u64,
    },
    BlockDiagonal {
        n: usize,
        w_block: usize,
        q: usize,
        k_blocks: usize,
        v: usize,
        seed: u64,
    },
    Composed {
        outer: Box<SketchDescriptor>,
        inner: Box<SketchDescriptor>,
    },
}
