//! Reference solutions computed with faer rather than the crate's own linear
//! algebra, and the instance families shared by the integration suites.

#![allow(dead_code)]

pub mod properties;

use sketchnla::synth;
use sketchnla::{DenseMatrix, SparseMatrix};

/// Seeds shared by every suite, so runs are deterministic.
pub const CI_SEEDS: std::ops::Range<u64> = 0..100;

pub fn sparse(a: &DenseMatrix) -> SparseMatrix {
    SparseMatrix::from_dense(a)
}

/// Thin SVD through faer, sorted non-increasing: `(u, sigma, v)`.
fn faer_svd(a: &DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    let (m, n) = a.shape();
    let svd = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)])
        .thin_svd()
        .expect("faer svd");
    let k = m.min(n);
    let s = svd.S().column_vector();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let u = DenseMatrix::from_fn(m, k, |r, c| svd.U()[(r, order[c])]);
    let v = DenseMatrix::from_fn(n, k, |r, c| svd.V()[(r, order[c])]);
    (u, order.iter().map(|&i| s[i]).collect(), v)
}

/// Minimum-norm least squares `V Σ⁺ Uᵀ b`.
pub fn ls_oracle(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (u, s, v) = faer_svd(a);
    let tol = 1e-12 * s.first().copied().unwrap_or(0.0);
    let mut coef = u.transpose() * b;
    for (j, sj) in s.iter().enumerate() {
        let inv = if *sj > tol { 1.0 / sj } else { 0.0 };
        coef.row_mut(j).scale_mut(inv);
    }
    v * coef
}

pub fn ls_residual(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (a * ls_oracle(a, b) - b).norm()
}

/// Squared row norms of the left singular vectors with nonnegligible
/// singular values.
pub fn leverage_oracle(a: &DenseMatrix) -> Vec<f64> {
    let (u, s, _) = faer_svd(a);
    let tol = 1e-10 * s.first().copied().unwrap_or(0.0);
    let r = s.iter().filter(|&&x| x > tol).count();
    (0..a.nrows())
        .map(|i| (0..r).map(|j| u[(i, j)] * u[(i, j)]).sum())
        .collect()
}

/// Singular values, non-increasing.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    faer_svd(a).1
}

/// `Δ_k = sqrt(Σ_{i>k} σ_i²)`.
pub fn tail_energy(a: &DenseMatrix, k: usize) -> f64 {
    singular_values(a)
        .iter()
        .skip(k)
        .map(|s| s * s)
        .sum::<f64>()
        .sqrt()
}

/// `min_x ‖Ax − b‖₁` as the linear program
/// `min Σ(u + v)` s.t. `A(x⁺ − x⁻) + u − v = b`, all variables nonnegative,
/// solved by a dense tableau simplex (Dantzig pricing, Bland's rule once
/// the objective stalls). Returns `(x, optimal objective)`.
pub fn l1_oracle(a: &DenseMatrix, b: &[f64]) -> (Vec<f64>, f64) {
    let (n, d) = a.shape();
    let nv = 2 * d + 2 * n;
    let cols = nv + 1;
    let mut t = vec![0.0; (n + 1) * cols];
    let mut basis = vec![0usize; n];
    let cost = |j: usize| if j >= 2 * d { 1.0 } else { 0.0 };
    for i in 0..n {
        let s = if b[i] >= 0.0 { 1.0 } else { -1.0 };
        for j in 0..d {
            t[i * cols + j] = s * a[(i, j)];
            t[i * cols + d + j] = -s * a[(i, j)];
        }
        t[i * cols + 2 * d + i] = s;
        t[i * cols + 2 * d + n + i] = -s;
        t[i * cols + nv] = s * b[i];
        basis[i] = if s > 0.0 { 2 * d + i } else { 2 * d + n + i };
    }
    // reduced costs c_j − c_Bᵀ T_j and the objective value in the last row
    for j in 0..cols {
        let mut z = if j < nv { cost(j) } else { 0.0 };
        for i in 0..n {
            z -= cost(basis[i]) * t[i * cols + j];
        }
        t[n * cols + j] = z;
    }
    let mut last_obj = f64::INFINITY;
    let mut stalls = 0;
    for _ in 0..100_000 {
        let bland = stalls > 50;
        let mut enter = None;
        let mut best = -1e-11;
        for j in 0..nv {
            let rc = t[n * cols + j];
            if rc < best {
                enter = Some(j);
                if bland {
                    break;
                }
                best = rc;
            }
        }
        let Some(e) = enter else { break };
        let mut leave = None;
        let mut ratio = f64::INFINITY;
        for i in 0..n {
            let piv = t[i * cols + e];
            if piv > 1e-12 {
                let r = t[i * cols + nv] / piv;
                if r < ratio - 1e-14
                    || (r <= ratio + 1e-14 && leave.is_some_and(|l: usize| basis[i] < basis[l]))
                {
                    ratio = r;
                    leave = Some(i);
                }
            }
        }
        let l = leave.expect("the l1 program is bounded below");
        let piv = t[l * cols + e];
        for j in 0..cols {
            t[l * cols + j] /= piv;
        }
        for i in 0..=n {
            if i != l {
                let f = t[i * cols + e];
                if f != 0.0 {
                    for j in 0..cols {
                        t[i * cols + j] -= f * t[l * cols + j];
                    }
                }
            }
        }
        basis[l] = e;
        let obj = -t[n * cols + nv];
        if obj < last_obj - 1e-12 {
            stalls = 0;
        } else {
            stalls += 1;
        }
        last_obj = obj;
    }
    let mut z = vec![0.0; nv];
    for i in 0..n {
        z[basis[i]] = t[i * cols + nv];
    }
    let x: Vec<f64> = (0..d).map(|j| z[j] - z[d + j]).collect();
    let obj = (0..n)
        .map(|i| (b[i] - (0..d).map(|j| a[(i, j)] * x[j]).sum::<f64>()).abs())
        .sum();
    (x, obj)
}

/// NNLS by enumerating every support: the optimum is the unconstrained
/// least-squares solution on some support that happens to be nonnegative.
pub fn nnls_oracle(a: &DenseMatrix, b: &DenseMatrix) -> (DenseMatrix, f64) {
    let d = a.ncols();
    assert!(d <= 12, "brute force over 2^{d} supports");
    let mut best = (DenseMatrix::zeros(d, 1), b.norm());
    for mask in 1u32..(1 << d) {
        let cols: Vec<usize> = (0..d).filter(|j| mask & (1 << j) != 0).collect();
        let sub = a.select_columns(&cols);
        let xs = ls_oracle(&sub, b);
        if xs.iter().any(|&v| v < 0.0) {
            continue;
        }
        let mut x = DenseMatrix::zeros(d, 1);
        for (k, &j) in cols.iter().enumerate() {
            x[j] = xs[k];
        }
        let r = (a * &x - b).norm();
        if r < best.1 {
            best = (x, r);
        }
    }
    best
}

/// 1000 x 10 Gaussian, the incoherent instance.
pub fn gaussian_instance(seed: u64) -> DenseMatrix {
    synth::gaussian(1000, 10, seed)
}

/// 1000 x 10 Gaussian with `100 I` embedded in the top block: the first ten
/// rows carry nearly all of the leverage.
pub fn coherent_instance(seed: u64) -> DenseMatrix {
    synth::identity_block(1000, 10, 100.0, seed)
}

/// `max_i |est_i / exact_i − 1|` over rows with nonzero exact score.
pub fn max_rel_err(est: &[f64], exact: &[f64]) -> f64 {
    est.iter()
        .zip(exact)
        .filter(|(_, &e)| e > 1e-14)
        .map(|(x, e)| (x / e - 1.0).abs())
        .fold(0.0, f64::max)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// `σ_max / σ_min`, infinite when rank deficient.
pub fn cond(a: &DenseMatrix) -> f64 {
    let sv = singular_values(a);
    let (hi, lo) = (sv[0], sv[sv.len() - 1]);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}
