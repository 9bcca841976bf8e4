//! Weighted lp solve by iteratively reweighted least squares.
//!
//! `|r|^p` is smoothed to `(r² + μ)^{p/2}` with `μ` annealed from `1e-2 s²`
//! to `1e-10 s²`, where `s` is the mean absolute residual of the starting
//! least-squares fit, so the solve is invariant under scaling `b`. Each step
//! solves a weighted least-squares problem; steps that fail to decrease the
//! smoothed objective are damped by halving.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::lstsq_dense;
use crate::matrix::{DenseMatrix, Tolerances};

const MU_START: f64 = 1e-2;
const MU_END: f64 = 1e-10;
const MU_FACTOR: f64 = 0.1;
const ITER_PER_LEVEL: usize = 200;
/// Per-step relative decrease that ends a level. Smoothing already moves each
/// residual by up to `sqrt(μ)`, about `1e-5 s` at the last level, so asking
/// for more digits than this only buys slow linear creep near zero residuals.
const REL_TOL: f64 = 1e-9;
const MAX_HALVINGS: usize = 40;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IrlsReport {
    pub iterations: usize,
    /// `(Σ c_i |r_i|^p)^{1/p}` after each step.
    pub objective_history: Vec<f64>,
}

/// Entrywise p-norm.
pub fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return v.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn weighted_objective(res: &DVector<f64>, c: &[f64], p: f64) -> f64 {
    res.iter().zip(c).map(|(r, ci)| ci * r.abs().powf(p)).sum()
}

fn smoothed(res: &DVector<f64>, c: &[f64], p: f64, mu: f64) -> f64 {
    res.iter()
        .zip(c)
        .map(|(r, ci)| ci * (r * r + mu).powf(p / 2.0))
        .sum()
}

fn weighted_ls(a: &DenseMatrix, b: &DVector<f64>, omega: &[f64]) -> Result<DVector<f64>> {
    let mut aw = a.clone();
    let mut bw = DenseMatrix::zeros(b.len(), 1);
    for (i, w) in omega.iter().enumerate() {
        let s = w.sqrt();
        aw.row_mut(i).scale_mut(s);
        bw[(i, 0)] = s * b[i];
    }
    Ok(lstsq_dense(&aw, &bw, &Tolerances::default())?
        .column(0)
        .into_owned())
}

/// `min_x Σ c_i |a_iᵀ x − b_i|^p` on all rows with unit multipliers.
pub fn lp_solve_full(
    a: &DenseMatrix,
    b: &DVector<f64>,
    p: f64,
) -> Result<(DVector<f64>, IrlsReport)> {
    lp_solve_weighted(a, b, &vec![1.0; b.len()], p)
}

/// `min_x Σ c_i |a_iᵀ x − b_i|^p` for multipliers `c_i > 0`.
pub fn lp_solve_weighted(
    a: &DenseMatrix,
    b: &DVector<f64>,
    c: &[f64],
    p: f64,
) -> Result<(DVector<f64>, IrlsReport)> {
    if a.nrows() != b.len() || c.len() != b.len() {
        return Err(Error::mismatch(
            "lp solve rows",
            a.nrows(),
            b.len().min(c.len()),
        ));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::param(format!("p must be finite and >= 1, got {p}")));
    }
    let mut x = weighted_ls(a, b, c)?;
    let mut report = IrlsReport::default();
    if p == 2.0 {
        let res = b - a * &x;
        report
            .objective_history
            .push(weighted_objective(&res, c, p).sqrt());
        return Ok((x, report));
    }
    let res0 = b - a * &x;
    let scale = res0.iter().map(|r| r.abs()).sum::<f64>() / res0.len().max(1) as f64;
    if scale <= 1e-14 * b.amax() || scale == 0.0 {
        report.objective_history.push(lp_norm(res0.as_slice(), p));
        return Ok((x, report));
    }

    let mut mu = MU_START * scale * scale;
    let mu_end = MU_END * scale * scale;
    let mut best = (weighted_objective(&res0, c, p), x.clone());
    loop {
        let last_level = mu <= mu_end * (1.0 + 1e-9);
        let mut converged = false;
        let mut f = smoothed(&(b - a * &x), c, p, mu);
        for _ in 0..ITER_PER_LEVEL {
            let res = b - a * &x;
            let omega: Vec<f64> = res
                .iter()
                .zip(c)
                .map(|(r, ci)| ci * (r * r + mu).powf(p / 2.0 - 1.0))
                .collect();
            let target = weighted_ls(a, b, &omega)?;
            let step = &target - &x;
            let mut tau = 1.0;
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let cand = &x + &step * tau;
                let fc = smoothed(&(b - a * &cand), c, p, mu);
                if fc <= f {
                    accepted = Some((cand, fc));
                    break;
                }
                tau *= 0.5;
            }
            report.iterations += 1;
            let Some((cand, fc)) = accepted else {
                converged = true;
                break;
            };
            let rel = (f - fc) / f.max(f64::MIN_POSITIVE);
            x = cand;
            f = fc;
            let res = b - a * &x;
            let obj = weighted_objective(&res, c, p);
            report.objective_history.push(obj.powf(1.0 / p));
            if obj < best.0 {
                best = (obj, x.clone());
            }
            if rel <= REL_TOL {
                converged = true;
                break;
            }
        }
        if last_level {
            if !converged {
                return Err(Error::IrlsNoConvergence {
                    iterations: report.iterations,
                    objective: best.0.powf(1.0 / p),
                    best: Box::new(DenseMatrix::from_column_slice(
                        best.1.len(),
                        1,
                        best.1.as_slice(),
                    )),
                });
            }
            return Ok((best.1, report));
        }
        mu = (mu * MU_FACTOR).max(mu_end);
    }
}
