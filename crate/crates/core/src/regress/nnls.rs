use nalgebra::DVector;

use super::{check_eps, check_rows, Method, RegressionSolution};
use crate::error::{Error, Result};
use crate::linalg::{lstsq_dense, residual_norm};
use crate::matrix::{DenseMatrix, SparseMatrix, Tolerances};
use crate::sketch::{default_sparse_dim, make_two_stage, srht_dim};

/// Dual feasibility tolerance relative to `‖A‖_F ‖b‖`.
const DUAL_TOL: f64 = 1e-8;

/// `min_{X >= 0} ‖AX − B‖_F`, one active-set solve per column of `B`.
pub fn nnls(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.nrows() != b.nrows() {
        return Err(Error::mismatch("nnls rows", a.nrows(), b.nrows()));
    }
    let mut x = DenseMatrix::zeros(a.ncols(), b.ncols());
    for (j, col) in b.column_iter().enumerate() {
        x.set_column(j, &nnls_column(a, &col.into_owned())?);
    }
    Ok(x)
}

/// Lawson-Hanson active set. `passive` holds the free variables; the
/// iterate stays feasible and each outer step frees the variable with the
/// largest positive dual.
fn nnls_column(a: &DenseMatrix, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.ncols();
    let tol = DUAL_TOL * (a.norm() * b.norm()).max(f64::MIN_POSITIVE);
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let mut blocked = vec![false; n];
    let cap = 3 * n + 30;

    for _ in 0..cap {
        let w = a.tr_mul(&(b - a * &x));
        let entering = (0..n)
            .filter(|&j| !passive[j] && !blocked[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j_new) = entering else {
            return Ok(x);
        };
        passive[j_new] = true;
        let mut first = true;
        loop {
            let s = solve_passive(a, b, &passive)?;
            if first && s[j_new] <= 0.0 {
                // w[j_new] was positive only through rounding
                passive[j_new] = false;
                blocked[j_new] = true;
                break;
            }
            first = false;
            if (0..n).filter(|&i| passive[i]).all(|i| s[i] > 0.0) {
                x = s;
                blocked.iter_mut().for_each(|b| *b = false);
                break;
            }
            let (i_min, alpha) = (0..n)
                .filter(|&i| passive[i] && s[i] <= 0.0)
                .map(|i| (i, x[i] / (x[i] - s[i])))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .expect("some passive entry is non-positive");
            x += (&s - &x) * alpha;
            // the blocking variable leaves exactly, others if rounding left them at zero
            x[i_min] = 0.0;
            passive[i_min] = false;
            let floor = 1e-14 * x.amax();
            for i in 0..n {
                if passive[i] && x[i] <= floor {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    Err(Error::NoConvergence {
        what: "nonnegative least squares",
        iterations: cap,
    })
}

fn solve_passive(a: &DenseMatrix, b: &DVector<f64>, passive: &[bool]) -> Result<DVector<f64>> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let ap = a.select_columns(&idx);
    let bp = DenseMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let z = lstsq_dense(&ap, &bp, &Tolerances::default())?;
    let mut s = DVector::zeros(passive.len());
    for (k, &i) in idx.iter().enumerate() {
        s[i] = z[(k, 0)];
    }
    Ok(s)
}

/// Nonnegative regression on an affine embedding of `[A B]` (sparse embedding
/// then SRHT, at `eps/3` split evenly between the two stages).
pub fn nonneg_regression(
    a: &SparseMatrix,
    b: &DenseMatrix,
    eps: f64,
    seed: u64,
) -> Result<RegressionSolution> {
    check_eps(eps)?;
    check_rows(a, b)?;
    let n = a.n_rows();
    let r = a.n_cols() + b.ncols();
    let stage_eps = eps / 6.0;
    let t_sparse = default_sparse_dim(r, stage_eps);
    let t_srht = srht_dim(r, stage_eps, t_sparse.min(n));
    let s = make_two_stage(n, t_sparse, t_srht, seed)?;
    let x = nnls(&s.apply_left(a)?, &s.apply_left(b)?)?;
    Ok(RegressionSolution {
        residual_norm: residual_norm(a, &x, b)?,
        x,
        method: Method::Nnls,
        sketch_dim: s.output_dim(),
        seed,
        iterations: 0,
        residual_history: Vec::new(),
    })
}
