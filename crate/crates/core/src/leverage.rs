//! Approximate leverage scores.
//!
//! Each repetition sketches `A` with a fast subspace embedding `Π₁`, takes a
//! change of basis `R` making `Π₁AR` orthonormal, and reads the scores off the
//! row norms of `AR`, through a Gaussian right sketch when that is narrower
//! than `R`. Repetitions are combined by a coordinate-wise median.

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{LEVERAGE_JL_SCALE, LEVERAGE_SRHT_SCALE};
use crate::error::{Error, Result};
use crate::linalg::{pivoted_qr, row_norms_squared};
use crate::matrix::{SparseMatrix, Tolerances};
use crate::rng::derive_seed;
use crate::sketch::{default_sparse_dim, make_gaussian_jl, make_two_stage};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeverageScores {
    pub scores: Vec<f64>,
    pub eps: f64,
    pub repetitions: usize,
    pub seed: u64,
    /// Numerical rank detected in the first repetition.
    pub rank: usize,
}

impl LeverageScores {
    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }
}

/// Rows of the SRHT stage: `c r max(1, ln r)^2 / eps^2`.
pub fn leverage_srht_rows(r: usize, eps: f64) -> usize {
    let rf = r.max(1) as f64;
    (LEVERAGE_SRHT_SCALE * rf * rf.ln().max(1.0).powi(2) / (eps * eps)).ceil() as usize
}

/// Gaussian probe width: `c ln(n) / eps^2`.
pub fn leverage_jl_cols(n: usize, eps: f64) -> usize {
    (LEVERAGE_JL_SCALE * (n.max(2) as f64).ln() / (eps * eps)).ceil() as usize
}

pub fn approx_leverage_scores(
    a: &SparseMatrix,
    eps: f64,
    repetitions: usize,
    seed: u64,
) -> Result<LeverageScores> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps must lie in (0, 1), got {eps}")));
    }
    if repetitions == 0 || repetitions.is_multiple_of(2) {
        return Err(Error::param(format!(
            "repetitions must be odd and positive, got {repetitions}"
        )));
    }
    let runs = (0..repetitions)
        .into_par_iter()
        .map(|rep| single_run(a, eps, derive_seed(seed, rep as u64)))
        .collect::<Result<Vec<_>>>()?;
    let rank = runs[0].1;
    let scores = (0..a.n_rows())
        .map(|i| {
            let mut col: Vec<f64> = runs.iter().map(|(s, _)| s[i]).collect();
            col.sort_by(f64::total_cmp);
            col[col.len() / 2]
        })
        .collect();
    Ok(LeverageScores {
        scores,
        eps,
        repetitions,
        seed,
        rank,
    })
}

fn single_run(a: &SparseMatrix, eps: f64, seed: u64) -> Result<(Vec<f64>, usize)> {
    let (n, d) = (a.n_rows(), a.n_cols());
    if n == 0 || d == 0 {
        return Ok((vec![0.0; n], 0));
    }
    // d bounds the rank from above, so sizing on d is conservative
    let pi = make_two_stage(
        n,
        default_sparse_dim(d, 0.25),
        leverage_srht_rows(d, eps),
        seed,
    )?;
    let pa = pi.apply_left(a)?;
    let pq = pivoted_qr(&pa, &Tolerances::default())?;
    if pq.rank == 0 {
        return Ok((vec![0.0; n], 0));
    }
    let r_inv = pq.change_of_basis();
    let k = leverage_jl_cols(n, eps);
    let basis = if k < pq.rank {
        let g = make_gaussian_jl(k, pq.rank, derive_seed(seed, 3))?;
        a.mul_dense(&g.apply_right(&r_inv)?)?
    } else {
        a.mul_dense(&r_inv)?
    };
    Ok((row_norms_squared(&basis), pq.rank))
}

/// Sampling distribution `p_i ∝ max(score_i, 1e-12)`. With scores within a
/// factor 2 of the truth this gives `p_i >= u_i / (2r)`.
pub fn sampling_probs_from_scores(scores: &[f64], r: usize) -> Result<Vec<f64>> {
    if r == 0 {
        return Err(Error::param("rank must be at least 1"));
    }
    if scores.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::param("scores must be finite and non-negative"));
    }
    if scores.iter().all(|&s| s == 0.0) {
        return Err(Error::Degenerate("all leverage scores are zero".into()));
    }
    let floored: Vec<f64> = scores.iter().map(|&s| s.max(1e-12)).collect();
    let total: f64 = floored.iter().sum();
    Ok(floored.into_iter().map(|s| s / total).collect())
}
