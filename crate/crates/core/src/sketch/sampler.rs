use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::{stream, stream_rng};

/// Row sampler: `t` i.i.d. picks `z_m ~ probs`, row `m` of the sketch is
/// `e_{z_m}^T / sqrt(t * probs[z_m])`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeverageSampler {
    n: usize,
    t: usize,
    probs: Vec<f64>,
    picks: Vec<usize>,
    weights: Vec<f64>,
    seed: u64,
}

impl LeverageSampler {
    pub fn new(probs: &[f64], t: usize, seed: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::param("sampler needs t >= 1"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::param(
                "sampling probabilities must be finite and non-negative",
            ));
        }
        let total: f64 = probs.iter().sum();
        if total == 0.0 {
            return Err(Error::param("sampling probabilities sum to zero"));
        }
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::param(format!(
                "sampling probabilities sum to {total}, expected 1"
            )));
        }
        let dist = WeightedIndex::new(probs).map_err(|e| Error::param(e.to_string()))?;
        let mut rng = stream_rng(seed, stream::SAMPLER);
        let picks: Vec<usize> = (0..t).map(|_| dist.sample(&mut rng)).collect();
        let weights = picks
            .iter()
            .map(|&z| 1.0 / (t as f64 * probs[z]).sqrt())
            .collect();
        Ok(LeverageSampler {
            n: probs.len(),
            t,
            probs: probs.to_vec(),
            picks,
            weights,
            seed,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.t
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn picks(&self) -> &[usize] {
        &self.picks
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// (row index, weight) pairs in pick order.
    pub fn weighted_picks(&self) -> Vec<(usize, f64)> {
        self.picks
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .collect()
    }

    pub(crate) fn apply_sparse(&self, a: &SparseMatrix) -> DenseMatrix {
        a.weighted_rows(&self.weighted_picks())
    }

    pub(crate) fn apply_dense(&self, a: &DenseMatrix) -> DenseMatrix {
        crate::matrix::weighted_dense_rows(a, &self.weighted_picks())
    }
}
