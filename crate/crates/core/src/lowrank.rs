//! Rank-k approximation `A ≈ L D Wᵀ` from two sketches.
//!
//! 1. `U` = orthonormal basis of `C(A Rᵀ)`.
//! 2. `SU` and `SA`.
//! 3. `SU = Ũ Σ̃ Ṽᵀ`.
//! 4. `Û D Wᵀ` = SVD of `Ṽ Σ̃⁻ [Ũᵀ SA]_k`.
//! 5. `L = U Û`.
//!
//! `R` and `S` are either SRHT-after-sparse compositions
//! ([`Strategy::SrhtCompose`]) or a sparse embedding for `R` with a leverage
//! sampler on the rows of `U` for `S`, grown until `cond(SU)` reaches a
//! target ([`Strategy::LeverageSample`]).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constants::{LOWRANK_TR_SCALE, LOWRANK_VPRIME_SCALE, LOWRANK_V_SCALE};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, pivoted_qr, row_norms_squared, thin_svd};
use crate::matrix::{DenseMatrix, SparseMatrix, Tolerances};
use crate::rng::{data_rng, derive_seed};
use crate::sketch::{
    default_sparse_dim, make_leverage_sampler, make_sparse_embedding, make_two_stage,
    SketchOperator,
};

/// `A ≈ l * diag(d) * wᵀ` with orthonormal `l`, `w` and non-increasing `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankFactors {
    pub l: DenseMatrix,
    pub d: Vec<f64>,
    pub w: DenseMatrix,
    pub k: usize,
}

impl LowRankFactors {
    pub fn to_dense(&self) -> DenseMatrix {
        let mut ld = self.l.clone();
        for (j, s) in self.d.iter().enumerate() {
            ld.column_mut(j).scale_mut(*s);
        }
        ld * self.w.transpose()
    }

    /// `‖A − L D Wᵀ‖_F`.
    pub fn error(&self, a: &SparseMatrix) -> f64 {
        let mut diff = a.to_dense();
        diff -= self.to_dense();
        diff.norm()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    SrhtCompose,
    LeverageSample,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowRankConfig {
    pub k: usize,
    pub eps: f64,
    pub strategy: Strategy,
    /// Overrides the row count of `R`.
    pub t_r: Option<usize>,
    /// Target for `cond(SU)` under [`Strategy::LeverageSample`].
    pub cond_target: f64,
    /// `t_S` never exceeds `ratio * t_R`.
    pub t_s_cap_ratio: usize,
}

impl LowRankConfig {
    pub fn new(k: usize, eps: f64) -> Self {
        LowRankConfig {
            k,
            eps,
            strategy: Strategy::SrhtCompose,
            t_r: None,
            cond_target: 1.2,
            t_s_cap_ratio: 110,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_t_r(mut self, t_r: usize) -> Self {
        self.t_r = Some(t_r);
        self
    }
}

#[derive(Clone, Debug)]
pub struct LowRankOutcome {
    pub factors: LowRankFactors,
    /// `‖A − L D Wᵀ‖_F` on the original data.
    pub err: f64,
    pub t_r: usize,
    pub t_s: usize,
    pub cond_su: f64,
    /// Every sampler drawn at the size cap missed `cond_target`.
    pub capped: bool,
}

/// Sketch sizes `(t_r, v, v')`: the final rows of `R`, and the sparse and
/// SRHT stages of `S`.
pub fn sketch_dims_lowrank(k: usize, eps: f64) -> (usize, usize, usize) {
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1), got {eps}");
    let kf = k.max(1) as f64;
    let lg = (kf / eps).ln().max(1.0);
    let t_r = ((LOWRANK_TR_SCALE * kf / eps * lg).ceil() as usize).max(k + 1);
    let v = (LOWRANK_V_SCALE * kf * kf / eps.powi(4) * lg).ceil() as usize;
    let v_prime =
        ((LOWRANK_VPRIME_SCALE * kf / eps.powi(3) * lg * lg).ceil() as usize).max(t_r + 1);
    (t_r, v.max(v_prime), v_prime)
}

/// Sparse-stage rows of `R`: enough for a constant-distortion embedding of a
/// rank-k space plus the `k/eps` term.
fn r_sparse_dim(k: usize, eps: f64, t_r: usize) -> usize {
    (default_sparse_dim(k, 0.5) + (k as f64 / eps).ceil() as usize).max(t_r)
}

/// Best Frobenius rank-k approximation.
pub fn truncate_rank_k(m: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    if k > m.nrows().min(m.ncols()) {
        return Err(Error::param(format!(
            "k = {k} exceeds min dimension of {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let svd = thin_svd(m, &Tolerances::default())?;
    let mut uk = svd.u.columns(0, k).into_owned();
    for j in 0..k {
        uk.column_mut(j).scale_mut(svd.sigma[j]);
    }
    Ok(uk * svd.v.columns(0, k).transpose())
}

/// Extends orthonormal columns `q` to `cols` orthonormal columns with random
/// directions orthogonalized against the existing ones.
pub fn orthonormal_completion(q: &DenseMatrix, cols: usize, seed: u64) -> DenseMatrix {
    let m = q.nrows();
    assert!(cols <= m, "cannot fit {cols} orthonormal columns in R^{m}");
    let mut out = DenseMatrix::zeros(m, cols);
    let keep = q.ncols().min(cols);
    out.columns_mut(0, keep).copy_from(&q.columns(0, keep));
    let mut rng = data_rng(seed);
    let mut j = keep;
    while j < cols {
        let mut v = nalgebra::DVector::<f64>::from_fn(m, |_, _| rng.sample(StandardNormal));
        // two passes of Gram-Schmidt keep the result orthogonal to working precision
        for _ in 0..2 {
            for i in 0..j {
                let c = out.column(i).dot(&v);
                v.axpy(-c, &out.column(i), 1.0);
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            out.set_column(j, &(v / nv));
            j += 1;
        }
    }
    out
}

fn check_k(a: &SparseMatrix, k: usize) -> Result<()> {
    if k == 0 || k > a.n_rows().min(a.n_cols()) {
        return Err(Error::param(format!(
            "k must lie in [1, {}], got {k}",
            a.n_rows().min(a.n_cols())
        )));
    }
    Ok(())
}

/// Default pipeline: SRHT-after-sparse sketches sized by
/// [`sketch_dims_lowrank`]. Returns the factors and `‖A − L D Wᵀ‖_F`.
pub fn low_rank_approx(
    a: &SparseMatrix,
    k: usize,
    eps: f64,
    seed: u64,
) -> Result<(LowRankFactors, f64)> {
    let out = low_rank_with(a, &LowRankConfig::new(k, eps), seed)?;
    Ok((out.factors, out.err))
}

pub fn low_rank_with(a: &SparseMatrix, cfg: &LowRankConfig, seed: u64) -> Result<LowRankOutcome> {
    check_k(a, cfg.k)?;
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err(Error::param(format!(
            "eps must lie in (0, 1), got {}",
            cfg.eps
        )));
    }
    let (n, n2) = (a.n_rows(), a.n_cols());
    let (t_r_default, v, v_prime) = sketch_dims_lowrank(cfg.k, cfg.eps);
    let t_r = cfg.t_r.unwrap_or(t_r_default);
    if t_r == 0 {
        return Err(Error::param("t_r must be positive"));
    }
    match cfg.strategy {
        Strategy::SrhtCompose => {
            let r = make_two_stage(
                n2,
                r_sparse_dim(cfg.k, cfg.eps, t_r),
                t_r,
                derive_seed(seed, 1),
            )?;
            let s = make_two_stage(n, v, v_prime, derive_seed(seed, 2))?;
            low_rank_with_sketches(a, cfg.k, &r, &s)
        }
        Strategy::LeverageSample => {
            let r = make_sparse_embedding(n2, t_r, derive_seed(seed, 1))?;
            leverage_pipeline(a, cfg, &r, t_r, derive_seed(seed, 2))
        }
    }
}

/// Step 1: orthonormal basis of `C(A Rᵀ)` at its numerical rank.
fn range_basis(a: &SparseMatrix, r: &SketchOperator) -> Result<DenseMatrix> {
    let art = r.apply_right(a)?;
    if art.ncols() > art.nrows() {
        return Ok(thin_svd(&art, &Tolerances::default())?.range_basis());
    }
    let qr = pivoted_qr(&art, &Tolerances::default())?;
    Ok(qr.q.columns(0, qr.rank).into_owned())
}

/// Runs the pipeline with caller-supplied sketches: `r` acts on the columns
/// of `A` (`input_dim = a.n_cols()`), `s` on its rows.
pub fn low_rank_with_sketches(
    a: &SparseMatrix,
    k: usize,
    r: &SketchOperator,
    s: &SketchOperator,
) -> Result<LowRankOutcome> {
    check_k(a, k)?;
    let u = range_basis(a, r)?;
    let su = s.apply_left(&u)?;
    finish(a, k, &u, &su, s, r.output_dim(), r.seed())
}

/// Fresh samplers tried at the size cap before giving up on `cond_target`.
const CAP_REDRAWS: usize = 16;

fn leverage_pipeline(
    a: &SparseMatrix,
    cfg: &LowRankConfig,
    r: &SketchOperator,
    t_r: usize,
    seed: u64,
) -> Result<LowRankOutcome> {
    let u = range_basis(a, r)?;
    let n = a.n_rows();
    if u.ncols() == 0 {
        let s = make_sparse_embedding(n, 1, seed)?;
        let su = s.apply_left(&u)?;
        return finish(a, cfg.k, &u, &su, &s, t_r, r.seed());
    }
    // exact leverage scores of U are its squared row norms
    let scores = row_norms_squared(&u);
    let total: f64 = scores.iter().sum();
    let probs: Vec<f64> = scores.iter().map(|s| s / total).collect();
    let cap = (cfg.t_s_cap_ratio * t_r).max(u.ncols() + 1);
    let mut t_s = (2 * u.ncols()).min(cap);
    let mut attempt = 0;
    let mut cap_draws = 0;
    loop {
        let s = make_leverage_sampler(&probs, t_s, derive_seed(seed, attempt))?;
        let su = s.apply_left(&u)?;
        let cond = condition_number(&su);
        cap_draws += usize::from(t_s >= cap);
        if cond <= cfg.cond_target || cap_draws >= CAP_REDRAWS {
            let mut out = finish(a, cfg.k, &u, &su, &s, t_r, r.seed())?;
            out.capped = cond > cfg.cond_target;
            return Ok(out);
        }
        t_s = ((t_s as f64 * 1.5).ceil() as usize).min(cap);
        attempt += 1;
    }
}

/// Steps 3 to 5.
fn finish(
    a: &SparseMatrix,
    k: usize,
    u: &DenseMatrix,
    su: &DenseMatrix,
    s: &SketchOperator,
    t_r: usize,
    seed: u64,
) -> Result<LowRankOutcome> {
    let (n, n2) = (a.n_rows(), a.n_cols());
    let tol = Tolerances::default();
    let sa = s.apply_left(a)?;
    let cond_su = condition_number(su);

    let (l, d, w) = if u.ncols() == 0 {
        (
            DenseMatrix::zeros(n, 0),
            Vec::new(),
            DenseMatrix::zeros(n2, 0),
        )
    } else {
        let svd = thin_svd(su, &tol)?;
        let rank = svd.rank;
        let ut = svd.u.columns(0, rank);
        let z = ut.transpose() * &sa;
        let zk = truncate_rank_k(&z, k.min(z.nrows()).min(z.ncols()))?;
        let mut vs = svd.v.columns(0, rank).into_owned();
        for j in 0..rank {
            vs.column_mut(j).scale_mut(1.0 / svd.sigma[j]);
        }
        let x = vs * zk;
        let xs = thin_svd(&x, &tol)?;
        let kk = k.min(xs.rank);
        let l = u * xs.u.columns(0, kk);
        (l, xs.sigma[..kk].to_vec(), xs.v.columns(0, kk).into_owned())
    };
    let kk = d.len();
    let mut d = d;
    d.resize(k, 0.0);
    let factors = LowRankFactors {
        l: if kk < k {
            orthonormal_completion(&l, k, derive_seed(seed, 7))
        } else {
            l
        },
        d,
        w: if kk < k {
            orthonormal_completion(&w, k, derive_seed(seed, 8))
        } else {
            w
        },
        k,
    };
    let err = factors.error(a);
    Ok(LowRankOutcome {
        factors,
        err,
        t_r,
        t_s: s.output_dim(),
        cond_su,
        capped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{best_rank_k, orthonormality_defect};
    use crate::sketch::make_full_srht;

    fn gaussian(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut rng = data_rng(seed);
        DenseMatrix::from_fn(m, n, |_, _| rng.sample(StandardNormal))
    }

    fn rank_k(m: usize, n: usize, k: usize, seed: u64) -> SparseMatrix {
        SparseMatrix::from_dense(&(gaussian(m, k, seed) * gaussian(k, n, seed + 1)))
    }

    #[test]
    fn truncate_examples() {
        let m = DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let t = truncate_rank_k(&m, 1).unwrap();
        let mut expect = DenseMatrix::zeros(3, 3);
        expect[(0, 0)] = 3.0;
        assert!((t - expect).amax() < 1e-14);
        assert!((truncate_rank_k(&m, 3).unwrap() - &m).amax() < 1e-14);

        let g = gaussian(10, 7, 1);
        let sv = g.singular_values();
        let mut sorted: Vec<f64> = sv.iter().copied().collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let tail = sorted[3..].iter().map(|s| s * s).sum::<f64>().sqrt();
        let err = (truncate_rank_k(&g, 3).unwrap() - g).norm();
        assert!((err - tail).abs() < 1e-10);
    }

    #[test]
    fn dims_floor_and_growth() {
        for k in [1, 2, 5, 20] {
            for eps in [0.1, 0.3, 0.5, 0.9] {
                let (t_r, v, vp) = sketch_dims_lowrank(k, eps);
                assert!(t_r > k);
                assert!(vp > t_r && v >= vp);
                let (_, v2, _) = sketch_dims_lowrank(k, eps / 2.0);
                assert!(v2 >= 4 * v);
            }
        }
    }

    #[test]
    fn exact_rank_k_is_recovered() {
        let a = rank_k(80, 60, 4, 2);
        let (f, err) = low_rank_approx(&a, 4, 0.5, 3).unwrap();
        assert!(err <= 1e-8 * a.frobenius_norm(), "{err}");
        assert!(orthonormality_defect(&f.l) <= 1e-8);
        assert!(orthonormality_defect(&f.w) <= 1e-8);
        assert!(f.d.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn k_above_rank_pads_with_zeros() {
        let a = rank_k(50, 40, 2, 4);
        let (f, err) = low_rank_approx(&a, 5, 0.5, 5).unwrap();
        assert!(err <= 1e-8 * a.frobenius_norm());
        assert_eq!(f.d.len(), 5);
        assert!(f.d[2..].iter().all(|&x| x == 0.0));
        assert!(orthonormality_defect(&f.l) <= 1e-8);
        assert!(orthonormality_defect(&f.w) <= 1e-8);
    }

    #[test]
    fn isometric_sketches_give_optimal_error() {
        let a = SparseMatrix::from_dense(&gaussian(40, 30, 6));
        let r = make_full_srht(30, 1).unwrap();
        let s = make_full_srht(40, 2).unwrap();
        let out = low_rank_with_sketches(&a, 3, &r, &s).unwrap();
        let (_, delta) = best_rank_k(&a, 3).unwrap();
        assert!((out.err - delta).abs() <= 1e-8 * delta);
    }

    #[test]
    fn leverage_strategy_meets_condition_target() {
        let a = SparseMatrix::from_dense(&gaussian(200, 80, 7));
        let cfg = LowRankConfig::new(3, 0.5)
            .with_strategy(Strategy::LeverageSample)
            .with_t_r(10);
        let out = low_rank_with(&a, &cfg, 8).unwrap();
        assert!(out.capped || out.cond_su <= 1.2);
        let (_, delta) = best_rank_k(&a, 3).unwrap();
        assert!(out.err >= delta - 1e-10);
    }

    #[test]
    fn bad_k_rejected() {
        let a = rank_k(10, 8, 2, 9);
        assert!(low_rank_approx(&a, 0, 0.5, 0).is_err());
        assert!(low_rank_approx(&a, 9, 0.5, 0).is_err());
    }

    #[test]
    fn completion_is_orthonormal() {
        let q = crate::linalg::thin_qr(&gaussian(12, 2, 10)).unwrap().0;
        let c = orthonormal_completion(&q, 5, 1);
        assert!(orthonormality_defect(&c) < 1e-12);
        assert_eq!(c.columns(0, 2), q.columns(0, 2));
    }
}
