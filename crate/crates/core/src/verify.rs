//! Measurable forms of the embedding guarantees.
//!
//! Subspace distortion is computed spectrally: for an orthonormal basis `U`
//! of the column space, `sup_{|x|=1} |‖SUx‖² − 1|` equals
//! `max(σ_max² − 1, 1 − σ_min²)` over the singular values of `SU`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lstsq_dense, thin_svd};
use crate::matrix::{DenseMatrix, SparseMatrix, Tolerances};
use crate::rng::data_rng;
use crate::sketch::{MatrixRef, SketchOperator};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionReport {
    pub eps_measured: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t: usize,
    pub seed: u64,
}

/// Orthonormal basis of the column space, sized to the numerical rank.
pub fn column_space_basis<'a>(a: impl Into<MatrixRef<'a>>) -> Result<DenseMatrix> {
    let dense = match a.into() {
        MatrixRef::Sparse(s) => s.to_dense(),
        MatrixRef::Dense(d) => d.clone(),
    };
    Ok(thin_svd(&dense, &Tolerances::default())?.range_basis())
}

/// Exact distortion of `s` over the column space of `a`.
pub fn max_distortion<'a>(
    s: &SketchOperator,
    a: impl Into<MatrixRef<'a>>,
) -> Result<DistortionReport> {
    let a = a.into();
    if a.n_rows() != s.input_dim() {
        return Err(Error::mismatch(
            "max_distortion rows",
            s.input_dim(),
            a.n_rows(),
        ));
    }
    basis_distortion(s, &column_space_basis(a)?)
}

/// Distortion of `s` over the span of an orthonormal `u`.
pub fn basis_distortion(s: &SketchOperator, u: &DenseMatrix) -> Result<DistortionReport> {
    let t = s.output_dim();
    let seed = s.seed();
    if u.ncols() == 0 {
        return Ok(DistortionReport {
            eps_measured: 0.0,
            sigma_min: 1.0,
            sigma_max: 1.0,
            t,
            seed,
        });
    }
    let su = s.apply_left(u)?;
    // all singular values are needed, including zeros, so no rank truncation
    let sv = thin_svd(&su, &Tolerances::default())?.sigma;
    let sigma_max = sv[0];
    let sigma_min = if su.nrows() < su.ncols() {
        0.0
    } else {
        sv[sv.len() - 1]
    };
    let eps_measured = (sigma_max * sigma_max - 1.0)
        .max(1.0 - sigma_min * sigma_min)
        .max(0.0);
    Ok(DistortionReport {
        eps_measured,
        sigma_min,
        sigma_max,
        t,
        seed,
    })
}

/// Lower estimate of the distortion from `samples` random unit vectors in
/// the span of `u`. Never exceeds the spectral value.
pub fn sampled_distortion(
    s: &SketchOperator,
    u: &DenseMatrix,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    let mut rng = data_rng(seed);
    let mut x = DenseMatrix::from_fn(u.ncols(), samples, |_, _| rng.sample(StandardNormal));
    for mut c in x.column_iter_mut() {
        let n = c.norm();
        c /= n;
    }
    let sux = s.apply_left(&(u * x))?;
    Ok(sux
        .column_iter()
        .map(|c| (c.norm_squared() - 1.0).abs())
        .fold(0.0, f64::max))
}

/// `‖AᵀSᵀSB − AᵀB‖_F / (‖A‖_F ‖B‖_F)`, zero when either factor is zero.
pub fn matrix_product_error(s: &SketchOperator, a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if a.nrows() != b.nrows() {
        return Err(Error::mismatch(
            "matrix_product_error rows",
            a.nrows(),
            b.nrows(),
        ));
    }
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    let sa = s.apply_left(a)?;
    let sb = s.apply_left(b)?;
    let diff = sa.transpose() * sb - a.transpose() * b;
    Ok(diff.norm() / denom)
}

/// `|‖SA‖²_F − ‖A‖²_F| / ‖A‖²_F`, zero for a zero matrix.
pub fn frobenius_error(s: &SketchOperator, a: &DenseMatrix) -> Result<f64> {
    let na = a.norm_squared();
    if na == 0.0 {
        return Ok(0.0);
    }
    let sa = s.apply_left(a)?;
    Ok((sa.norm_squared() - na).abs() / na)
}

/// Worst relative error of `‖S(AX − B)‖²` over a probe set: `probes`
/// standard normal `X`, the least-squares optimum and `X = 0`. Probes where
/// `AX = B` to working precision are skipped.
pub fn affine_embedding_error(
    s: &SketchOperator,
    a: &SparseMatrix,
    b: &DenseMatrix,
    probes: usize,
    seed: u64,
) -> Result<f64> {
    if a.n_rows() != b.nrows() {
        return Err(Error::mismatch(
            "affine_embedding_error rows",
            a.n_rows(),
            b.nrows(),
        ));
    }
    let (d, dp) = (a.n_cols(), b.ncols());
    let mut rng = data_rng(seed);
    let mut xs: Vec<DenseMatrix> = (0..probes)
        .map(|_| DenseMatrix::from_fn(d, dp, |_, _| rng.sample(StandardNormal)))
        .collect();
    xs.push(lstsq_dense(&a.to_dense(), b, &Tolerances::default())?);
    xs.push(DenseMatrix::zeros(d, dp));
    let sa = s.apply_left(a)?;
    let sb = s.apply_left(b)?;
    let mut worst: f64 = 0.0;
    for x in &xs {
        let ax = a.mul_dense(x)?;
        let true_sq = (&ax - b).norm_squared();
        let scale = ax.norm_squared() + b.norm_squared();
        if true_sq <= 1e-24 * scale || true_sq == 0.0 {
            continue;
        }
        let sketched_sq = (&sa * x - &sb).norm_squared();
        worst = worst.max((sketched_sq - true_sq).abs() / true_sq);
    }
    Ok(worst)
}
