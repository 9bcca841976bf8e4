//! Least-squares solvers built on sketches.
//!
//! Every [`RegressionSolution`] carries the residual `‖AX − B‖_F` recomputed
//! on the original data, never the sketched residual.

mod coreset;
mod iterative;
mod nnls;

use serde::Serialize;

pub use coreset::{coreset_size, generalized_regression, Coreset};
pub use iterative::{cgnr_solve, precondition, richardson_solve, Preconditioner, DEFAULT_MAX_ITER};
pub use nnls::{nnls, nonneg_regression};

use crate::error::{Error, Result};
use crate::linalg::{lstsq_dense, residual_norm};
use crate::matrix::{DenseMatrix, SparseMatrix, Tolerances};
use crate::sketch::{default_sparse_dim, make_sparse_embedding, SketchOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Sketch,
    Coreset,
    Richardson,
    Cgnr,
    Nnls,
    Lp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionSolution {
    #[serde(skip)]
    pub x: DenseMatrix,
    /// `‖AX − B‖_F` on the original data (the p-norm for lp solves).
    pub residual_norm: f64,
    pub method: Method,
    pub sketch_dim: usize,
    pub seed: u64,
    /// 0 for direct solves.
    pub iterations: usize,
    /// Residual after each iteration of an iterative solver, starting from
    /// the initial guess.
    pub residual_history: Vec<f64>,
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("eps must lie in (0, 1), got {eps}")))
    }
}

pub(crate) fn check_rows(a: &SparseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.n_rows() == b.nrows() {
        Ok(())
    } else {
        Err(Error::mismatch("rows of A and B", a.n_rows(), b.nrows()))
    }
}

/// Sketch-and-solve with a sparse embedding sized for the column space of
/// `[A B]`.
pub fn sketch_solve_ls(
    a: &SparseMatrix,
    b: &DenseMatrix,
    eps: f64,
    seed: u64,
) -> Result<RegressionSolution> {
    check_eps(eps)?;
    check_rows(a, b)?;
    let t = default_sparse_dim(a.n_cols() + b.ncols(), eps);
    let s = make_sparse_embedding(a.n_rows(), t, seed)?;
    sketch_solve_with(a, b, &s)
}

/// Solves `min ‖S(AX − B)‖_F` for a caller-supplied sketch.
pub fn sketch_solve_with(
    a: &SparseMatrix,
    b: &DenseMatrix,
    s: &SketchOperator,
) -> Result<RegressionSolution> {
    check_rows(a, b)?;
    let sa = s.apply_left(a)?;
    let sb = s.apply_left(b)?;
    let x = lstsq_dense(&sa, &sb, &Tolerances::default())?;
    Ok(RegressionSolution {
        residual_norm: residual_norm(a, &x, b)?,
        x,
        method: Method::Sketch,
        sketch_dim: s.output_dim(),
        seed: s.seed(),
        iterations: 0,
        residual_history: Vec::new(),
    })
}
