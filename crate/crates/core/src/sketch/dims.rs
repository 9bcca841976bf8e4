//! Sketch-size heuristics. Shapes follow the asymptotic bounds; the leading
//! constants live in [`crate::constants`].

use crate::constants::*;

fn check_eps(eps: f64) {
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1), got {eps}");
}

/// Output dimension of a sparse embedding targeting distortion `eps` on an
/// `r`-dimensional subspace: `c (r/eps)^2 max(1, ln(r/eps))^pow`, at least 4.
/// Panics unless `eps` lies in `(0, 1)`.
pub fn default_sparse_dim(r: usize, eps: f64) -> usize {
    check_eps(eps);
    let ratio = r.max(1) as f64 / eps;
    let t = SPARSE_DIM_SCALE * ratio * ratio * ratio.ln().max(1.0).powi(SPARSE_DIM_LOG_POWER);
    (t.ceil() as usize).max(SPARSE_DIM_FLOOR)
}

/// Parameters of a generalized sparse embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneralizedParams {
    pub q: usize,
    pub k_blocks: usize,
    pub v: usize,
}

impl GeneralizedParams {
    pub fn output_dim(&self) -> usize {
        self.q * self.k_blocks * self.v
    }
}

/// `k_blocks ~ ln(r/(eps delta))/eps`, `v ~ 1/eps`,
/// `q ~ r (r + ln(1/(delta eps))) / eps^2`.
/// Panics unless `eps` and `delta` lie in `(0, 1)`.
pub fn generalized_params(r: usize, eps: f64, delta: f64) -> GeneralizedParams {
    check_eps(eps);
    assert!(
        delta > 0.0 && delta < 1.0,
        "delta must lie in (0, 1), got {delta}"
    );
    let r = r.max(1) as f64;
    let k_blocks = (GEN_K_SCALE * (r / (eps * delta)).ln() / eps)
        .ceil()
        .max(1.0) as usize;
    let v = (GEN_V_SCALE / eps).ceil().max(1.0) as usize;
    let q = (GEN_Q_SCALE * r * (r + (1.0 / (delta * eps)).ln()) / (eps * eps))
        .ceil()
        .max(1.0) as usize;
    GeneralizedParams { q, k_blocks, v }
}

/// SRHT rows for distortion `eps` on an `r`-dimensional subspace of `R^n`:
/// `c (1 + ln r) (sqrt r + sqrt ln n)^2 / eps^2`, at least `r + 1`.
pub fn srht_dim(r: usize, eps: f64, n: usize) -> usize {
    check_eps(eps);
    let rf = r.max(1) as f64;
    let lnn = (n.max(2) as f64).ln();
    let t = SRHT_DIM_SCALE * (1.0 + rf.ln()) * (rf.sqrt() + lnn.sqrt()).powi(2) / (eps * eps);
    (t.ceil() as usize).max(r + 1)
}
