//! Dense decompositions and the exact (deterministic) oracles that every
//! randomized routine in this crate is measured against.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lowrank::LowRankFactors;
use crate::matrix::{DenseMatrix, SparseMatrix, Tolerances};

/// Thin singular value decomposition `a = u * diag(sigma) * v^T`.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    /// Non-increasing.
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
    /// Number of singular values above `rank_rel_tol * sigma[0]`.
    pub rank: usize,
}

impl SvdFactors {
    /// Leading `rank` left singular vectors: an orthonormal basis of the range.
    pub fn range_basis(&self) -> DenseMatrix {
        self.u.columns(0, self.rank).into_owned()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.transpose()
    }
}

fn check_finite(a: &DenseMatrix, what: &str) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidMatrix(format!("{what}: non-finite entry")))
    }
}

fn numerical_rank(sigma: &[f64], tol: &Tolerances) -> usize {
    match sigma.first() {
        Some(&s1) if s1 > 0.0 => sigma
            .iter()
            .take_while(|&&s| s > tol.rank_rel_tol * s1)
            .count(),
        _ => 0,
    }
}

/// Thin SVD with singular values sorted in decreasing order.
pub fn thin_svd(a: &DenseMatrix, tol: &Tolerances) -> Result<SvdFactors> {
    check_finite(a, "thin_svd")?;
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 || a.amax() == 0.0 {
        return Ok(SvdFactors {
            u: DenseMatrix::identity(m, k),
            sigma: vec![0.0; k],
            v: DenseMatrix::identity(n, k),
            rank: 0,
        });
    }
    // nalgebra's bidiagonal SVD loses orthogonality on exactly rank
    // deficient inputs, so the factorization goes through faer. Sequential
    // so results do not depend on the size of the calling thread pool.
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::svd::{svd as faer_svd, svd_scratch, ComputeSvdVectors};
    let fa = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let mut fu = faer::Mat::<f64>::zeros(m, k);
    let mut fv = faer::Mat::<f64>::zeros(n, k);
    let mut fs = faer::diag::Diag::<f64>::zeros(k);
    let par = faer::Par::Seq;
    let thin = ComputeSvdVectors::Thin;
    let mut buf = MemBuffer::new(svd_scratch::<f64>(
        m,
        n,
        thin,
        thin,
        par,
        Default::default(),
    ));
    faer_svd(
        fa.as_ref(),
        fs.as_mut(),
        Some(fu.as_mut()),
        Some(fv.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|_| Error::NoConvergence {
        what: "SVD",
        iterations: 0,
    })?;
    let s = fs.column_vector();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));

    let sigma: Vec<f64> = order.iter().map(|&i| s[i].max(0.0)).collect();
    let u = DenseMatrix::from_fn(m, k, |r, c| fu[(r, order[c])]);
    let v = DenseMatrix::from_fn(n, k, |r, c| fv[(r, order[c])]);
    let rank = numerical_rank(&sigma, tol);
    Ok(SvdFactors { u, sigma, v, rank })
}

/// Householder thin QR with `diag(r) >= 0`. Requires `n_rows >= n_cols`.
pub fn thin_qr(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    check_finite(a, "thin_qr")?;
    if a.nrows() < a.ncols() {
        return Err(Error::param(format!(
            "thin_qr needs n_rows >= n_cols, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let qr = a.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows() {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    Ok((q, r))
}

/// Column-pivoted Householder QR: `a * P = q * r`, with `|r_ii|` non-increasing.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    /// `m x min(m, n)`, orthonormal columns.
    pub q: DenseMatrix,
    /// `min(m, n) x n`, upper triangular in pivoted column order.
    pub r: DenseMatrix,
    /// Column `j` of `a * P` is column `perm[j]` of `a`.
    pub perm: Vec<usize>,
    pub rank: usize,
}

impl PivotedQr {
    /// An `n x rank` matrix `M` with `a * M = q[:, :rank]`, i.e. the inverse of
    /// the leading triangular block lifted back through the permutation.
    pub fn change_of_basis(&self) -> DenseMatrix {
        let n = self.r.ncols();
        let k = self.rank;
        let mut out = DenseMatrix::zeros(n, k);
        if k == 0 {
            return out;
        }
        let lead = self.r.view((0, 0), (k, k)).into_owned();
        let inv = lead
            .solve_upper_triangular(&DenseMatrix::identity(k, k))
            .expect("leading block has nonzero diagonal by rank selection");
        for j in 0..k {
            out.row_mut(self.perm[j]).copy_from(&inv.row(j));
        }
        out
    }
}

pub fn pivoted_qr(a: &DenseMatrix, tol: &Tolerances) -> Result<PivotedQr> {
    check_finite(a, "pivoted_qr")?;
    let (m, n) = a.shape();
    let k = m.min(n);
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors: Vec<(DVector<f64>, f64)> = Vec::with_capacity(k);

    for i in 0..k {
        let (p, _) = (i..n)
            .map(|j| (j, w.view((i, j), (m - i, 1)).norm_squared()))
            .fold(
                (i, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if p != i {
            w.swap_columns(i, p);
            perm.swap(i, p);
        }
        let mut v: DVector<f64> = w.view((i, i), (m - i, 1)).column(0).into_owned();
        let alpha = v.norm();
        if alpha == 0.0 {
            reflectors.push((v, 0.0));
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let beta = 2.0 / v.norm_squared();
        for j in i..n {
            let mut col = w.column_mut(j);
            let mut seg = col.rows_range_mut(i..);
            let s = v.dot(&seg);
            seg.axpy(-beta * s, &v, 1.0);
        }
        reflectors.push((v, beta));
    }

    let mut r = DenseMatrix::zeros(k, n);
    for j in 0..n {
        for i in 0..k.min(j + 1) {
            r[(i, j)] = w[(i, j)];
        }
    }
    let mut q = DenseMatrix::identity(m, k);
    for (i, (v, beta)) in reflectors.iter().enumerate().rev() {
        if *beta == 0.0 {
            continue;
        }
        for j in 0..k {
            let mut col = q.column_mut(j);
            let mut seg = col.rows_range_mut(i..);
            let s = v.dot(&seg);
            seg.axpy(-beta * s, v, 1.0);
        }
    }
    for i in 0..k {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    let diag: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let rank = numerical_rank(&diag, tol);
    Ok(PivotedQr { q, r, perm, rank })
}

/// Minimum-norm least-squares solution `X = a^+ b` through the SVD
/// pseudoinverse (singular values at or below the rank cutoff are dropped).
pub fn lstsq_dense(a: &DenseMatrix, b: &DenseMatrix, tol: &Tolerances) -> Result<DenseMatrix> {
    if a.nrows() != b.nrows() {
        return Err(Error::mismatch(
            "least squares rhs rows",
            a.nrows(),
            b.nrows(),
        ));
    }
    check_finite(b, "least squares rhs")?;
    let svd = thin_svd(a, tol)?;
    let r = svd.rank;
    let ur = svd.u.columns(0, r);
    let mut coef = ur.transpose() * b;
    for i in 0..r {
        coef.row_mut(i).scale_mut(1.0 / svd.sigma[i]);
    }
    Ok(svd.v.columns(0, r) * coef)
}

/// `X* = A^+ B`: minimizes `||AX - B||_F`, minimum Frobenius norm among minimizers.
pub fn exact_least_squares(
    a: &SparseMatrix,
    b: &DenseMatrix,
    tol: &Tolerances,
) -> Result<DenseMatrix> {
    if a.n_rows() != b.nrows() {
        return Err(Error::mismatch(
            "exact_least_squares rhs rows",
            a.n_rows(),
            b.nrows(),
        ));
    }
    lstsq_dense(&a.to_dense(), b, tol)
}

/// `||A X - B||_F` evaluated on the given data.
pub fn residual_norm(a: &SparseMatrix, x: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    let ax = a.mul_dense(x)?;
    if ax.shape() != b.shape() {
        return Err(Error::mismatch("residual rhs rows", ax.nrows(), b.nrows()));
    }
    Ok((ax - b).norm())
}

/// Squared row norms of an orthonormal basis of the column space, from a
/// column-pivoted QR of `a`.
pub fn exact_leverage_scores(a: &SparseMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    let dense = a.to_dense();
    if dense.ncols() == 0 || dense.nrows() == 0 {
        return Ok(vec![0.0; a.n_rows()]);
    }
    let qr = pivoted_qr(&dense, tol)?;
    let basis = qr.q.columns(0, qr.rank);
    Ok(row_norms_squared(&basis.into_owned()))
}

pub fn row_norms_squared(m: &DenseMatrix) -> Vec<f64> {
    let mut out = vec![0.0; m.nrows()];
    for col in m.column_iter() {
        for (o, v) in out.iter_mut().zip(col.iter()) {
            *o += v * v;
        }
    }
    out
}

/// Truncated SVD: the best rank-`k` factors and `delta_k = ||A - [A]_k||_F`.
pub fn best_rank_k(a: &SparseMatrix, k: usize) -> Result<(LowRankFactors, f64)> {
    best_rank_k_dense(&a.to_dense(), k)
}

pub fn best_rank_k_dense(a: &DenseMatrix, k: usize) -> Result<(LowRankFactors, f64)> {
    let (m, n) = a.shape();
    if k > m.min(n) {
        return Err(Error::param(format!(
            "k = {k} exceeds min dimension {}",
            m.min(n)
        )));
    }
    let svd = thin_svd(a, &Tolerances::default())?;
    let delta = svd.sigma[k..].iter().map(|s| s * s).sum::<f64>().sqrt();
    let factors = LowRankFactors {
        l: svd.u.columns(0, k).into_owned(),
        d: svd.sigma[..k].to_vec(),
        w: svd.v.columns(0, k).into_owned(),
        k,
    };
    Ok((factors, delta))
}

/// Spectral condition number `sigma_max / sigma_min`; `+inf` when the matrix
/// does not have full column rank.
pub fn condition_number(a: &DenseMatrix) -> f64 {
    if a.ncols() == 0 {
        return 1.0;
    }
    if a.nrows() < a.ncols() {
        return f64::INFINITY;
    }
    match thin_svd(a, &Tolerances::default()) {
        Ok(svd) if svd.rank == a.ncols() => svd.sigma[0] / svd.sigma[svd.rank - 1],
        _ => f64::INFINITY,
    }
}

/// `max |q^T q - I|`.
pub fn orthonormality_defect(q: &DenseMatrix) -> f64 {
    let g = q.transpose() * q;
    let k = g.nrows();
    (g - DenseMatrix::identity(k, k)).amax()
}
