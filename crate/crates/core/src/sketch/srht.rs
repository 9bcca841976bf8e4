use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{stream, stream_rng};

/// In-place unnormalized fast Walsh-Hadamard transform; `x.len()` must be a
/// power of two.
pub fn fwht(x: &mut [f64]) {
    let n = x.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in x.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// Subsampled randomized Hadamard transform
/// `sqrt(n_pad/t) * Sample * (1/sqrt(n_pad)) * H * D`, with the input
/// zero-padded to `n_pad`, the next power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct SrhtOperator {
    n: usize,
    n_pad: usize,
    t: usize,
    sign: Vec<f64>,
    sampled_rows: Vec<usize>,
    /// Combined scale applied to the unnormalized transform: `1/sqrt(t)`.
    scale: f64,
    seed: u64,
    all_rows: bool,
}

impl SrhtOperator {
    /// Rows sampled uniformly with replacement.
    pub fn new(n: usize, t: usize, seed: u64) -> Result<Self> {
        if n == 0 || t == 0 {
            return Err(Error::param("SRHT needs n >= 1 and t >= 1"));
        }
        let n_pad = n.next_power_of_two();
        if t > n_pad {
            return Err(Error::param(format!(
                "SRHT needs t <= n_pad ({t} > {n_pad})"
            )));
        }
        let mut rrng = stream_rng(seed, stream::SRHT_ROWS);
        let sampled_rows = (0..t).map(|_| rrng.random_range(0..n_pad)).collect();
        Ok(Self::build(n, n_pad, t, sampled_rows, seed, false))
    }

    /// Keeps every row of `H * D`: an exact isometry on `R^n`. Used as the
    /// identity-like reference operator in tests and diagnostics.
    pub fn all_rows(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("SRHT needs n >= 1"));
        }
        let n_pad = n.next_power_of_two();
        Ok(Self::build(
            n,
            n_pad,
            n_pad,
            (0..n_pad).collect(),
            seed,
            true,
        ))
    }

    fn build(
        n: usize,
        n_pad: usize,
        t: usize,
        sampled_rows: Vec<usize>,
        seed: u64,
        all_rows: bool,
    ) -> Self {
        let mut srng = stream_rng(seed, stream::SRHT_SIGN);
        let sign = (0..n_pad)
            .map(|_| if srng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        SrhtOperator {
            n,
            n_pad,
            t,
            sign,
            sampled_rows,
            scale: 1.0 / (t as f64).sqrt(),
            seed,
            all_rows,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.t
    }

    pub fn padded_dim(&self) -> usize {
        self.n_pad
    }

    pub fn sampled_rows(&self) -> &[usize] {
        &self.sampled_rows
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_all_rows(&self) -> bool {
        self.all_rows
    }

    pub(crate) fn apply_dense(&self, a: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.t, a.ncols());
        let mut buf = vec![0.0; self.n_pad];
        for (src, mut dst) in a.column_iter().zip(out.column_iter_mut()) {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = if i < self.n {
                    self.sign[i] * src[i]
                } else {
                    0.0
                };
            }
            fwht(&mut buf);
            for (m, &row) in self.sampled_rows.iter().enumerate() {
                dst[m] = self.scale * buf[row];
            }
        }
        out
    }
}
