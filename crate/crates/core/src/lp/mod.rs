//! lp regression by well-conditioned-basis sampling.
//!
//! `[A b]` is embedded block by block with independent generalized sparse
//! embeddings `F`; a QR of `FA` gives the change of basis `U`. Rows are
//! sampled with replacement proportionally to the p-th powers of the row
//! norms of `AU`, and the weighted coreset problem is solved by smoothed
//! IRLS.

mod irls;

use nalgebra::DVector;
use serde::Serialize;

pub use irls::{lp_norm, lp_solve_full, lp_solve_weighted, IrlsReport};

use crate::constants::{LP_PROBE_SCALE, LP_SAMPLE_SCALE};
use crate::error::{Error, Result};
use crate::linalg::{pivoted_qr, row_norms_squared};
use crate::matrix::{DenseMatrix, SparseMatrix, Tolerances};
use crate::regress::{Coreset, Method, RegressionSolution};
use crate::rng::derive_seed;
use crate::sketch::{
    generalized_params, make_gaussian_jl, BlockDiagonalEmbedding, LeverageSampler, SketchOperator,
};

/// Distortion each block of `F` is built for.
const BLOCK_EPS: f64 = 0.5;
/// Block width is `min(n, BLOCK_WIDTH_PER_RANK * r)`.
const BLOCK_WIDTH_PER_RANK: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpParams {
    pub p: f64,
    /// Rows per diagonal block of `F`.
    pub w_block: usize,
    /// Output rows per block.
    pub t_inner: usize,
    pub gamma_p: f64,
    pub eps: f64,
    pub seed: u64,
    pub q: usize,
    pub k_blocks: usize,
    pub v: usize,
    /// Overrides the sample size.
    pub t_sample: Option<usize>,
    /// Gaussian probe columns for row-norm estimation.
    pub n_probe: usize,
}

impl LpParams {
    /// Defaults for an `n`-row problem whose column space has dimension at
    /// most `r`: `w = min(n, 256 r)`, blocks built for distortion 1/2 with
    /// failure probability `1/(100 n)`.
    pub fn new(n: usize, r: usize, p: f64, eps: f64, seed: u64) -> Result<Self> {
        let w_block = n.min(BLOCK_WIDTH_PER_RANK * r.max(1)).max(1);
        Self::with_block(n, r, p, eps, seed, w_block)
    }

    pub fn with_block(
        n: usize,
        r: usize,
        p: f64,
        eps: f64,
        seed: u64,
        w_block: usize,
    ) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::param(format!("p must be finite and >= 1, got {p}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param(format!("eps must lie in (0, 1), got {eps}")));
        }
        if n == 0 || w_block == 0 {
            return Err(Error::param("lp regression needs n >= 1 and w_block >= 1"));
        }
        let delta = 1.0 / (100.0 * n as f64);
        let g = generalized_params(r.max(1), BLOCK_EPS, delta);
        let t_inner = g.output_dim();
        let gamma_p = if p <= 2.0 {
            2f64.sqrt() * (t_inner as f64).powf(1.0 / p - 0.5)
        } else {
            2f64.sqrt() * (w_block as f64).powf(0.5 - 1.0 / p)
        };
        Ok(LpParams {
            p,
            w_block,
            t_inner,
            gamma_p,
            eps,
            seed,
            q: g.q,
            k_blocks: g.k_blocks,
            v: g.v,
            t_sample: None,
            n_probe: ((LP_PROBE_SCALE * (n.max(2) as f64).ln()).ceil() as usize).max(1),
        })
    }

    pub fn with_sample_size(mut self, t: usize) -> Self {
        self.t_sample = Some(t);
        self
    }

    /// Dual exponent `q` with `1/p + 1/q = 1` (`inf` for `p = 1`).
    pub fn dual(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }
}

/// Block-diagonal `F` for an `n`-row input.
pub fn build_block_embedding(n: usize, params: &LpParams) -> Result<SketchOperator> {
    Ok(SketchOperator::BlockDiagonal(BlockDiagonalEmbedding::new(
        n,
        params.w_block,
        params.q,
        params.k_blocks,
        params.v,
        derive_seed(params.seed, 1),
    )?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionedBasis {
    /// `d x rank`; `A * u_change` is the conditioned basis.
    #[serde(skip)]
    pub u_change: DenseMatrix,
    /// Entrywise p-norm of `A * u_change`, measured.
    pub alpha: f64,
    /// Upper bound on `alpha * beta`, valid whenever `F` embeds the column
    /// space with distortion 1/2.
    pub beta_bound: f64,
    pub rank: usize,
}

/// Bound on the conditioning product of a basis `V` with `‖FVz‖₂ = ‖z‖₂`:
/// `‖V‖_p ≤ (nr)^{max(0,1/p−1/2)} sqrt(r/(1−ε))` and
/// `‖z‖_q ≤ r^{max(0,1/q−1/2)} n^{max(0,1/2−1/p)} sqrt(1+ε) ‖Vz‖_p`.
pub fn conditioning_bound(n: usize, r: usize, p: f64) -> f64 {
    let (nf, rf) = (n as f64, r as f64);
    let q_inv = 1.0 - 1.0 / p;
    let pos = |x: f64| x.max(0.0);
    (nf * rf).powf(pos(1.0 / p - 0.5))
        * rf.sqrt()
        * rf.powf(pos(q_inv - 0.5))
        * nf.powf(pos(0.5 - 1.0 / p))
        * ((1.0 + BLOCK_EPS) / (1.0 - BLOCK_EPS)).sqrt()
}

pub fn condition_basis(a: &SparseMatrix, params: &LpParams) -> Result<ConditionedBasis> {
    let f = build_block_embedding(a.n_rows(), params)?;
    let fa = f.apply_left(a)?;
    let qr = pivoted_qr(&fa, &Tolerances::default())?;
    if qr.rank == 0 {
        return Err(Error::Degenerate("A has numerical rank 0".into()));
    }
    let u_change = qr.change_of_basis() / (qr.rank as f64 * params.gamma_p);
    let au = a.mul_dense(&u_change)?;
    Ok(ConditionedBasis {
        alpha: lp_norm(au.as_slice(), params.p),
        beta_bound: conditioning_bound(a.n_rows(), qr.rank, params.p),
        u_change,
        rank: qr.rank,
    })
}

/// Slack on p-th powers when row p-norms are inferred from 2-norms.
pub fn norm_slack(r: usize, p: f64) -> f64 {
    (r.max(1) as f64).powf((p / 2.0 - 1.0).abs())
}

/// Sampling probabilities proportional to `‖(AU)_i‖_p^p`. The row norms are
/// estimated through `n_probe` Gaussian columns when that is narrower than
/// the basis, in which case the p-norms are only known up to
/// [`norm_slack`]; otherwise they are exact. Returns the probabilities and
/// the slack to fold into the sample size.
pub fn lp_sampling_probs(
    a: &SparseMatrix,
    basis: &ConditionedBasis,
    params: &LpParams,
    n_probe: usize,
) -> Result<(Vec<f64>, f64)> {
    let p = params.p;
    let (weights, slack) = if n_probe < basis.rank {
        let g = make_gaussian_jl(n_probe, basis.rank, derive_seed(params.seed, 2))?;
        let est = a.mul_dense(&g.apply_right(&basis.u_change)?)?;
        let w: Vec<f64> = row_norms_squared(&est)
            .into_iter()
            .map(|s| s.powf(p / 2.0))
            .collect();
        (w, norm_slack(basis.rank, p))
    } else {
        let au = a.mul_dense(&basis.u_change)?;
        let w = (0..au.nrows())
            .map(|i| au.row(i).iter().map(|v| v.abs().powf(p)).sum())
            .collect();
        (w, 1.0)
    };
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Degenerate("conditioned basis has no mass".into()));
    }
    Ok((weights.into_iter().map(|w| w / total).collect(), slack))
}

/// `c r (alpha beta)^p slack / eps^2`.
pub fn lp_sample_size(rank: usize, beta_bound: f64, slack: f64, params: &LpParams) -> usize {
    let t = LP_SAMPLE_SCALE * rank as f64 * beta_bound.powf(params.p) * slack
        / (params.eps * params.eps);
    (t.ceil() as usize).max(rank + 1)
}

/// Appends `b` as an extra column.
fn augment(a: &SparseMatrix, b: &DVector<f64>) -> Result<SparseMatrix> {
    let d = a.n_cols();
    let mut trip: Vec<(usize, usize, f64)> = a.triplets().collect();
    trip.extend(
        b.iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| (i, d, v)),
    );
    SparseMatrix::from_triplets(a.n_rows(), d + 1, &trip)
}

/// Samples `t` rows with replacement and merges repeats: row `i` drawn
/// `c_i` times gets objective multiplier `c_i / (t p_i)`, reported as the
/// weight `(c_i / (t p_i))^{1/p}`.
fn sample_coreset(probs: &[f64], t: usize, p: f64, seed: u64) -> Result<Coreset> {
    let sampler = LeverageSampler::new(probs, t, seed)?;
    let mut counts = vec![0usize; probs.len()];
    for &i in sampler.picks() {
        counts[i] += 1;
    }
    let rows = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i, (c as f64 / (t as f64 * probs[i])).powf(1.0 / p)))
        .collect();
    Ok(Coreset { rows, size: t })
}

/// Sampling-based lp regression; see the module docs.
pub fn lp_regress(
    a: &SparseMatrix,
    b: &DenseMatrix,
    params: &LpParams,
) -> Result<RegressionSolution> {
    Ok(lp_regress_with_coreset(a, b, params)?.0)
}

pub fn lp_regress_with_coreset(
    a: &SparseMatrix,
    b: &DenseMatrix,
    params: &LpParams,
) -> Result<(RegressionSolution, Coreset)> {
    if b.ncols() != 1 {
        return Err(Error::param(format!(
            "lp regression takes a single right-hand side, got {}",
            b.ncols()
        )));
    }
    if a.n_rows() != b.nrows() {
        return Err(Error::mismatch("rows of A and b", a.n_rows(), b.nrows()));
    }
    let bv = b.column(0).into_owned();
    let aug = augment(a, &bv)?;
    let basis = condition_basis(&aug, params)?;
    let (probs, slack) = lp_sampling_probs(&aug, &basis, params, params.n_probe)?;
    let t = params
        .t_sample
        .unwrap_or_else(|| lp_sample_size(basis.rank, basis.beta_bound, slack, params));
    let coreset = sample_coreset(&probs, t, params.p, derive_seed(params.seed, 3))?;
    let mut sol = solve_on_coreset(a, b, &coreset, params.p)?;
    sol.seed = params.seed;
    Ok((sol, coreset))
}

/// Weighted lp solve on the rows of `coreset`, where weight `w` enters the
/// objective as the multiplier `w^p`. The residual is measured on all of
/// `(A, b)`.
pub fn solve_on_coreset(
    a: &SparseMatrix,
    b: &DenseMatrix,
    coreset: &Coreset,
    p: f64,
) -> Result<RegressionSolution> {
    if b.ncols() != 1 {
        return Err(Error::param(format!(
            "lp regression takes a single right-hand side, got {}",
            b.ncols()
        )));
    }
    if a.n_rows() != b.nrows() {
        return Err(Error::mismatch("rows of A and b", a.n_rows(), b.nrows()));
    }
    if let Some(&(i, _)) = coreset.rows.iter().find(|r| r.0 >= a.n_rows()) {
        return Err(Error::param(format!(
            "coreset row {i} out of range for {} rows",
            a.n_rows()
        )));
    }
    let idx: Vec<usize> = coreset.rows.iter().map(|r| r.0).collect();
    let c: Vec<f64> = coreset.rows.iter().map(|r| r.1.powf(p)).collect();
    let dense = a.to_dense();
    let sub_a = dense.select_rows(&idx);
    let sub_b = DVector::from_iterator(idx.len(), idx.iter().map(|&i| b[(i, 0)]));
    let (x, report) = lp_solve_weighted(&sub_a, &sub_b, &c, p)?;

    let resid = &dense * &x - b.column(0);
    Ok(RegressionSolution {
        residual_norm: lp_norm(resid.as_slice(), p),
        x: DenseMatrix::from_column_slice(x.len(), 1, x.as_slice()),
        method: Method::Lp,
        sketch_dim: coreset.size,
        seed: 0,
        iterations: report.iterations,
        residual_history: report.objective_history,
    })
}
