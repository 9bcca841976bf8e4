//! Calibrated constants for every `O(.)` dimension formula in the crate.
//!
//! The asymptotic bounds fix the shape of each formula but not its leading
//! constant. The values below were chosen by the sweeps in
//! `examples/calibrate.rs` (run it with `--release` to reproduce); each
//! comment states the target the sweep was tuned against.

/// `default_sparse_dim = max(floor, c * (r/eps)^2 * max(1, ln(r/eps))^pow)`.
/// Target: >= 90/100 seeds with squared-norm distortion <= eps on random
/// Gaussian and identity-block (coherent) column spaces, r in {5, 10, 20}.
pub const SPARSE_DIM_SCALE: f64 = 1.0;
pub const SPARSE_DIM_LOG_POWER: i32 = 1;
pub const SPARSE_DIM_FLOOR: usize = 4;

/// Generalized embedding: `k_blocks = c1 ln(r/(eps delta)) / eps`,
/// `v = c2 / eps`, `q = c3 r (r + ln(1/(delta eps))) / eps^2`.
/// Target: >= 95/100 seeds at distortion <= 0.5 for r = 10, delta = 0.05 on
/// both the Gaussian and the identity-block instance. Collisions between the
/// heavy rows of the latter are what `v` guards against.
pub const GEN_K_SCALE: f64 = 0.25;
pub const GEN_V_SCALE: f64 = 4.0;
pub const GEN_Q_SCALE: f64 = 0.05;

/// SRHT subspace dimension `c (1 + ln r) (sqrt r + sqrt ln n)^2 / eps^2`.
pub const SRHT_DIM_SCALE: f64 = 0.5;

/// Leverage scores: rows of the SRHT stage `c * r * max(1, ln r)^2` and
/// Gaussian probe columns `c * ln(n) / eps^2`.
pub const LEVERAGE_SRHT_SCALE: f64 = 4.0;
pub const LEVERAGE_JL_SCALE: f64 = 4.0;

/// Coreset regression sample size `c * (r/eps + r ln r)`.
pub const CORESET_SCALE: f64 = 4.0;

/// Low-rank sketch sizes: `t_r = c_r (k/eps) ln(k/eps)`, `v = c_v k^2/eps^4 ...`
/// (see `lowrank::sketch_dims_lowrank`).
pub const LOWRANK_TR_SCALE: f64 = 1.0;
pub const LOWRANK_V_SCALE: f64 = 0.5;
pub const LOWRANK_VPRIME_SCALE: f64 = 0.5;

/// lp sampling: `t = c * r * (alpha beta)^p * r^{|p/2 - 1|} / eps^2`.
pub const LP_SAMPLE_SCALE: f64 = 1.0;
/// Gaussian probe columns for lp row-norm estimation: `c * ln n`.
pub const LP_PROBE_SCALE: f64 = 8.0;
