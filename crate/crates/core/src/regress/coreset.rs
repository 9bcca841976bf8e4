use serde::Serialize;

use super::{check_eps, check_rows, Method, RegressionSolution};
use crate::constants::CORESET_SCALE;
use crate::error::{Error, Result};
use crate::leverage::{approx_leverage_scores, sampling_probs_from_scores};
use crate::linalg::{lstsq_dense, residual_norm};
use crate::matrix::{weighted_dense_rows, DenseMatrix, SparseMatrix, Tolerances};
use crate::rng::derive_seed;
use crate::sketch::LeverageSampler;

/// Weighted row subset; `rows.len() == size`, repeats allowed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coreset {
    pub rows: Vec<(usize, f64)>,
    pub size: usize,
}

/// `c (r/eps + r ln r)`, at least `r + 1`.
pub fn coreset_size(r: usize, eps: f64) -> usize {
    let rf = r.max(1) as f64;
    let t = CORESET_SCALE * (rf / eps + rf * rf.ln().max(1.0));
    (t.ceil() as usize).max(r + 1)
}

/// Leverage-score coreset regression, valid for any number of right-hand
/// sides.
pub fn generalized_regression(
    a: &SparseMatrix,
    b: &DenseMatrix,
    eps: f64,
    seed: u64,
) -> Result<(RegressionSolution, Coreset)> {
    check_eps(eps)?;
    check_rows(a, b)?;
    // constant-factor scores are all the sampler needs
    let scores = approx_leverage_scores(a, 0.5, 3, derive_seed(seed, 1))?;
    if scores.rank == 0 {
        return Err(Error::Degenerate("A has numerical rank 0".into()));
    }
    let probs = sampling_probs_from_scores(&scores.scores, scores.rank)?;
    let t = coreset_size(scores.rank, eps);
    let sampler = LeverageSampler::new(&probs, t, derive_seed(seed, 2))?;
    let rows = sampler.weighted_picks();
    let sa = a.weighted_rows(&rows);
    let sb = weighted_dense_rows(b, &rows);
    let x = lstsq_dense(&sa, &sb, &Tolerances::default())?;
    let sol = RegressionSolution {
        residual_norm: residual_norm(a, &x, b)?,
        x,
        method: Method::Coreset,
        sketch_dim: t,
        seed,
        iterations: 0,
        residual_history: Vec::new(),
    };
    Ok((sol, Coreset { rows, size: t }))
}
