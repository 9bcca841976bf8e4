//! Synthetic instances: planted spectra, coherent column spaces, ill
//! conditioning, and a reproducible on-disk corpus of `.mtx` files.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::io::write_sparse_matrix_market;
use crate::linalg::thin_qr;
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::{data_rng, derive_seed};

pub fn gaussian(n: usize, d: usize, seed: u64) -> DenseMatrix {
    let mut rng = data_rng(seed);
    DenseMatrix::from_fn(n, d, |_, _| rng.sample(StandardNormal))
}

/// Gaussian `n x d` matrix whose top `d x d` block is replaced by `scale * I`.
/// For large `scale` the first `d` rows carry almost all of the leverage.
pub fn identity_block(n: usize, d: usize, scale: f64, seed: u64) -> DenseMatrix {
    assert!(n >= d, "identity block needs n >= d");
    let mut a = gaussian(n, d, seed);
    a.rows_mut(0, d).fill(0.0);
    a.rows_mut(0, d).fill_diagonal(scale);
    a
}

/// Orthonormal `n x m` basis whose leverage concentrates on the first `m`
/// rows as `coherence` goes from 0 (Gaussian) to 1 (the coordinate basis).
pub fn coherent_basis(n: usize, m: usize, coherence: f64, seed: u64) -> DenseMatrix {
    assert!(n >= m, "basis needs n >= m");
    assert!(
        (0.0..=1.0).contains(&coherence),
        "coherence must lie in [0, 1]"
    );
    let mut g = gaussian(n, m, seed) * ((1.0 - coherence) / (n as f64).sqrt());
    for j in 0..m {
        g[(j, j)] += coherence;
    }
    let (q, _) = thin_qr(&g).expect("orthonormalizing a random basis");
    q
}

/// `U diag(sigma) Vᵀ` with `U` from [`coherent_basis`] and a Gaussian `V`.
pub fn planted_spectrum(
    n: usize,
    d: usize,
    sigma: &[f64],
    coherence: f64,
    seed: u64,
) -> DenseMatrix {
    let m = sigma.len();
    assert!(m <= n.min(d), "spectrum longer than min(n, d)");
    let mut u = coherent_basis(n, m, coherence, derive_seed(seed, 1));
    let (v, _) =
        thin_qr(&gaussian(d, m, derive_seed(seed, 2))).expect("orthonormalizing a random basis");
    for (j, s) in sigma.iter().enumerate() {
        u.column_mut(j).scale_mut(*s);
    }
    u * v.transpose()
}

/// `k` unit singular values followed by a tail `tail * decay^i` of length
/// `m - k`.
pub fn head_tail_spectrum(k: usize, m: usize, tail: f64, decay: f64) -> Vec<f64> {
    (0..m)
        .map(|i| {
            if i < k {
                1.0
            } else {
                tail * decay.powi((i - k) as i32)
            }
        })
        .collect()
}

/// `n x d` matrix with singular values spaced geometrically from 1 down to
/// `1/kappa`, so its condition number is `kappa`.
pub fn ill_conditioned(n: usize, d: usize, kappa: f64, seed: u64) -> DenseMatrix {
    let sigma: Vec<f64> = (0..d)
        .map(|i| kappa.powf(-(i as f64) / (d.max(2) - 1) as f64))
        .collect();
    planted_spectrum(n, d, &sigma, 0.0, seed)
}

/// `b = A x0 + noise * g` for a Gaussian `x0` and `g`.
pub fn regression_rhs(a: &DenseMatrix, noise: f64, seed: u64) -> DenseMatrix {
    a * gaussian(a.ncols(), 1, derive_seed(seed, 1))
        + gaussian(a.nrows(), 1, derive_seed(seed, 2)) * noise
}

/// Randomly sparse `n x d` matrix with about `density * n * d` Gaussian
/// entries, every column touched at least once.
pub fn sparse_random(n: usize, d: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut rng = data_rng(seed);
    let mut trip = Vec::new();
    for j in 0..d {
        trip.push((
            rng.random_range(0..n),
            j,
            rng.sample::<f64, _>(StandardNormal),
        ));
    }
    let extra = ((density * (n * d) as f64) as usize).saturating_sub(d);
    for _ in 0..extra {
        trip.push((
            rng.random_range(0..n),
            rng.random_range(0..d),
            rng.sample(StandardNormal),
        ));
    }
    SparseMatrix::from_triplets(n, d, &trip).expect("indices are in range")
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSpec {
    pub count: usize,
    pub n_range: (usize, usize),
    pub d_range: (usize, usize),
    /// Planted head size; the spectrum has a unit head of this size.
    pub k: usize,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 20,
            n_range: (200, 400),
            d_range: (130, 200),
            k: 5,
            seed: 0,
        }
    }
}

/// Matrix `i` of the corpus: planted head of size `k`, a tail whose level
/// and decay vary with `i`, and coherence cycling through `{0, 0.3, 0.6, 0.9}`.
pub fn corpus_matrix(spec: &CorpusSpec, i: usize) -> SparseMatrix {
    let seed = derive_seed(spec.seed, i as u64);
    let mut rng = data_rng(seed);
    let n = rng.random_range(spec.n_range.0..=spec.n_range.1);
    let d = rng.random_range(spec.d_range.0..=spec.d_range.1).min(n);
    let m = d.min(4 * spec.k.max(1) + 20);
    let tail = 0.05 + 0.45 * rng.random::<f64>();
    let decay = 0.8 + 0.19 * rng.random::<f64>();
    let coherence = [0.0, 0.3, 0.6, 0.9][i % 4];
    let sigma = head_tail_spectrum(spec.k.min(m), m, tail, decay);
    SparseMatrix::from_dense(&planted_spectrum(n, d, &sigma, coherence, seed))
}

/// Writes `spec.count` matrices as `synth_NNN.mtx` into `dir`.
pub fn write_corpus(dir: impl AsRef<Path>, spec: &CorpusSpec) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    if spec.d_range.0 == 0
        || spec.n_range.0 == 0
        || spec.n_range.0 > spec.n_range.1
        || spec.d_range.0 > spec.d_range.1
    {
        return Err(Error::param(format!(
            "bad corpus ranges n {:?}, d {:?}",
            spec.n_range, spec.d_range
        )));
    }
    fs::create_dir_all(dir)?;
    (0..spec.count)
        .map(|i| {
            let path = dir.join(format!("synth_{i:03}.mtx"));
            write_sparse_matrix_market(&path, &corpus_matrix(spec, i))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{condition_number, orthonormality_defect, row_norms_squared};

    #[test]
    fn planted_spectrum_has_the_planted_values() {
        let sigma = [5.0, 2.0, 0.5];
        let a = planted_spectrum(40, 20, &sigma, 0.5, 1);
        let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
        sv.sort_by(|x, y| y.total_cmp(x));
        for (got, want) in sv.iter().zip(&sigma) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(sv[3] < 1e-10);
    }

    #[test]
    fn coherence_moves_leverage_to_the_top_rows() {
        let top = |c: f64| {
            row_norms_squared(&coherent_basis(200, 4, c, 2))[..4]
                .iter()
                .sum::<f64>()
        };
        let q = coherent_basis(200, 4, 0.6, 2);
        assert!(orthonormality_defect(&q) < 1e-12);
        assert!(top(0.0) < top(0.6) && top(0.6) < top(0.95));
        assert!(top(1.0) > 4.0 - 1e-9);
    }

    #[test]
    fn ill_conditioning_is_exact() {
        let k = condition_number(&ill_conditioned(100, 6, 1e6, 3));
        assert!((k / 1e6 - 1.0).abs() < 1e-6, "{k}");
    }

    #[test]
    fn corpus_is_reproducible() {
        let spec = CorpusSpec {
            count: 2,
            n_range: (30, 40),
            d_range: (10, 12),
            k: 2,
            seed: 9,
        };
        assert_eq!(corpus_matrix(&spec, 1), corpus_matrix(&spec, 1));
        let dir = tempfile::tempdir().unwrap();
        let paths = write_corpus(dir.path(), &spec).unwrap();
        assert_eq!(paths.len(), 2);
        let back = crate::io::load_matrix_market(&paths[0]).unwrap();
        let orig = corpus_matrix(&spec, 0);
        assert!((back.to_dense() - orig.to_dense()).amax() < 1e-15);
    }

    #[test]
    fn sparse_random_touches_every_column() {
        let a = sparse_random(50, 10, 0.05, 4);
        let cols: std::collections::BTreeSet<usize> = a.triplets().map(|t| t.1).collect();
        assert_eq!(cols.len(), 10);
    }
}
