//! Rank-k approximation of a planted spectrum with both strategies for the
//! second sketch, compared with the truncated SVD.
//!
//! ```text
//! cargo run --release --example low_rank
//! ```

use sketchnla::linalg::best_rank_k;
use sketchnla::lowrank::{low_rank_with, LowRankConfig, Strategy};
use sketchnla::synth::planted_spectrum;
use sketchnla::SparseMatrix;

fn main() -> sketchnla::Result<()> {
    let sigma: Vec<f64> = (1..=300).map(|i| 1.0 / i as f64).collect();
    let a = SparseMatrix::from_dense(&planted_spectrum(400, 300, &sigma, 0.0, 1));
    let k = 5;
    let (_, delta) = best_rank_k(&a, k)?;
    println!("400 x 300, σ_i = 1/i, k = {k}, Δ_k = {delta:.5}");
    for strategy in [Strategy::SrhtCompose, Strategy::LeverageSample] {
        for eps in [0.5, 0.25] {
            let out = low_rank_with(&a, &LowRankConfig::new(k, eps).with_strategy(strategy), 3)?;
            println!(
                "  {strategy:?} eps {eps:<4}  t_R {:>3}  t_S {:>4}  cond(SU) {:.3}  err / Δ_k {:.4}",
                out.t_r,
                out.t_s,
                out.cond_su,
                out.err / delta
            );
        }
    }
    Ok(())
}
