//! Randomized numerical linear algebra in input-sparsity time.
//!
//! Sparse (CountSketch-style) and generalized block embeddings, SRHTs,
//! leverage-score samplers and Gaussian JL maps, together with the solvers
//! built from them: sketch-and-solve and coreset least squares, sketched
//! preconditioners for Richardson and CGNR iteration, nonnegative least
//! squares, leverage-score estimation, rank-k approximation and sampling-based
//! lp regression. Exact dense oracles for all of them live in [`linalg`], and
//! [`verify`] turns the embedding guarantees into measurable diagnostics.
//!
//! Each capability has a runnable program under `examples/`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod constants;
pub mod error;
pub mod io;
pub mod leverage;
pub mod linalg;
pub mod lowrank;
pub mod lp;
pub mod matrix;
pub mod regress;
pub mod rng;
pub mod sketch;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, SparseMatrix, Tolerances};
pub use sketch::SketchOperator;
