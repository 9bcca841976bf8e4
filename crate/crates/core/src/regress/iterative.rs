use serde::Serialize;

use super::{check_rows, Method, RegressionSolution};
use crate::error::{Error, Result};
use crate::linalg::{pivoted_qr, residual_norm};
use crate::matrix::{DenseMatrix, SparseMatrix, Tolerances};
use crate::sketch::{default_sparse_dim, make_two_stage, srht_dim};

pub const DEFAULT_MAX_ITER: usize = 100;

/// Change of basis `R⁻¹` (d × rank) making `A R⁻¹` well conditioned.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Preconditioner {
    #[serde(skip)]
    pub r_inv: DenseMatrix,
    pub eps0: f64,
    pub seed: u64,
    pub rank: usize,
    pub sketch_dim: usize,
}

/// Sketches `A` with an SRHT after a sparse embedding, each at distortion
/// `eps0 / 2`, and inverts the triangular factor of a pivoted QR of the
/// sketch on its numerical-rank block. When the sketch embeds the column
/// space, `κ(A R⁻¹) <= sqrt((1 + eps0) / (1 − eps0))`.
pub fn precondition(a: &SparseMatrix, eps0: f64, seed: u64) -> Result<Preconditioner> {
    if !(eps0 > 0.0 && eps0 <= 0.5) {
        return Err(Error::param(format!(
            "eps0 must lie in (0, 0.5], got {eps0}"
        )));
    }
    let (n, d) = (a.n_rows(), a.n_cols());
    let t_sparse = default_sparse_dim(d, eps0 / 2.0);
    let t_srht = srht_dim(d, eps0 / 2.0, t_sparse.min(n));
    let pi = make_two_stage(n, t_sparse, t_srht, seed)?;
    let pa = pi.apply_left(a)?;
    let pq = pivoted_qr(&pa, &Tolerances::default())?;
    if pq.rank == 0 {
        return Err(Error::Degenerate("A has numerical rank 0".into()));
    }
    Ok(Preconditioner {
        r_inv: pq.change_of_basis(),
        eps0,
        seed,
        rank: pq.rank,
        sketch_dim: pi.output_dim(),
    })
}

fn check_pre(a: &SparseMatrix, pre: &Preconditioner) -> Result<()> {
    if pre.r_inv.nrows() != a.n_cols() {
        return Err(Error::mismatch(
            "preconditioner rows",
            a.n_cols(),
            pre.r_inv.nrows(),
        ));
    }
    Ok(())
}

/// Relative growth below this is treated as roundoff.
const GROWTH_FLOOR: f64 = 1e-10;

/// Tracks the stopping rule shared by both iterative solvers.
struct Monitor {
    history: Vec<f64>,
    tol: f64,
    floor: f64,
    growth: usize,
}

enum Step {
    Continue,
    Converged,
}

impl Monitor {
    fn new(b: &DenseMatrix, eps: f64) -> Self {
        let b_norm = b.norm();
        Monitor {
            history: vec![b_norm],
            tol: eps / 10.0,
            floor: 1e-13 * b_norm,
            growth: 0,
        }
    }

    fn record(&mut self, res: f64, what: &str) -> Result<Step> {
        let prev = *self.history.last().expect("history starts non-empty");
        self.history.push(res);
        if res <= self.floor {
            return Ok(Step::Converged);
        }
        let change = (prev - res) / prev;
        // growth at roundoff level is stagnation, not divergence
        if change < -self.tol.max(GROWTH_FLOOR) {
            self.growth += 1;
            if self.growth >= 2 {
                return Err(Error::Divergence(format!(
                    "{what} residual grew for two consecutive iterations ({prev:.3e} -> {res:.3e}); the preconditioner does not embed the column space"
                )));
            }
            return Ok(Step::Continue);
        }
        self.growth = 0;
        if change.abs() <= self.tol {
            Ok(Step::Converged)
        } else {
            Ok(Step::Continue)
        }
    }
}

/// Richardson iteration `y ← y + R⁻ᵀAᵀ(B − AR⁻¹y)` from `y = 0`. Stops when
/// the residual changes by at most `eps/10` relative, or at `max_iter`.
pub fn richardson_solve(
    a: &SparseMatrix,
    pre: &Preconditioner,
    b: &DenseMatrix,
    eps: f64,
    max_iter: usize,
) -> Result<RegressionSolution> {
    check_rows(a, b)?;
    check_pre(a, pre)?;
    let m = &pre.r_inv;
    let mut y = DenseMatrix::zeros(m.ncols(), b.ncols());
    let mut res = b.clone();
    let mut mon = Monitor::new(b, eps);
    let mut iterations = 0;
    if b.norm() > 0.0 {
        while iterations < max_iter {
            let g = m.tr_mul(&a.tr_mul_dense(&res)?);
            y += g;
            res = b - a.mul_dense(&(m * &y))?;
            iterations += 1;
            if let Step::Converged = mon.record(res.norm(), "Richardson")? {
                break;
            }
        }
    }
    finish(
        a,
        b,
        m * y,
        Method::Richardson,
        pre,
        iterations,
        mon.history,
    )
}

/// CGLS on the preconditioned system `min ‖A R⁻¹ y − B‖`, each right-hand
/// side with its own step lengths. Residuals are non-increasing.
pub fn cgnr_solve(
    a: &SparseMatrix,
    pre: &Preconditioner,
    b: &DenseMatrix,
    eps: f64,
    max_iter: usize,
) -> Result<RegressionSolution> {
    check_rows(a, b)?;
    check_pre(a, pre)?;
    let m = &pre.r_inv;
    let cols = b.ncols();
    let normal = |r: &DenseMatrix| -> Result<DenseMatrix> { Ok(m.tr_mul(&a.tr_mul_dense(r)?)) };

    let mut y = DenseMatrix::zeros(m.ncols(), cols);
    let mut res = b.clone();
    let mut s = normal(&res)?;
    let mut p = s.clone();
    let mut gamma: Vec<f64> = s.column_iter().map(|c| c.norm_squared()).collect();
    let gamma_floor: Vec<f64> = gamma.iter().map(|g| g * 1e-30).collect();
    let mut mon = Monitor::new(b, eps);
    let mut iterations = 0;
    while iterations < max_iter && gamma.iter().zip(&gamma_floor).any(|(g, f)| *g > *f) {
        let q = a.mul_dense(&(m * &p))?;
        for j in 0..cols {
            let qq = q.column(j).norm_squared();
            if gamma[j] <= gamma_floor[j] || qq == 0.0 {
                continue;
            }
            let alpha = gamma[j] / qq;
            y.column_mut(j).axpy(alpha, &p.column(j), 1.0);
            res.column_mut(j).axpy(-alpha, &q.column(j), 1.0);
        }
        s = normal(&res)?;
        for (j, g) in gamma.iter_mut().enumerate() {
            let g_new = s.column(j).norm_squared();
            let beta = if *g > 0.0 { g_new / *g } else { 0.0 };
            let pj = s.column(j) + p.column(j) * beta;
            p.set_column(j, &pj);
            *g = g_new;
        }
        iterations += 1;
        if let Step::Converged = mon.record(res.norm(), "CGNR")? {
            break;
        }
    }
    finish(a, b, m * y, Method::Cgnr, pre, iterations, mon.history)
}

fn finish(
    a: &SparseMatrix,
    b: &DenseMatrix,
    x: DenseMatrix,
    method: Method,
    pre: &Preconditioner,
    iterations: usize,
    residual_history: Vec<f64>,
) -> Result<RegressionSolution> {
    Ok(RegressionSolution {
        residual_norm: residual_norm(a, &x, b)?,
        x,
        method,
        sketch_dim: pre.sketch_dim,
        seed: pre.seed,
        iterations,
        residual_history,
    })
}
