//! Approximate leverage scores against the exact ones on a matrix whose
//! mass concentrates in a few rows, then the sampling distribution built
//! from them.
//!
//! ```text
//! cargo run --release --example leverage_scores
//! ```

use sketchnla::leverage::{approx_leverage_scores, sampling_probs_from_scores};
use sketchnla::linalg::exact_leverage_scores;
use sketchnla::synth::planted_spectrum;
use sketchnla::{SparseMatrix, Tolerances};

fn main() -> sketchnla::Result<()> {
    let sigma: Vec<f64> = (1..=15).map(|i| 1.0 / i as f64).collect();
    let a = SparseMatrix::from_dense(&planted_spectrum(3000, 15, &sigma, 0.9, 2));
    let exact = exact_leverage_scores(&a, &Tolerances::default())?;
    let approx = approx_leverage_scores(&a, 0.3, 3, 17)?;
    let worst = exact
        .iter()
        .zip(&approx.scores)
        .map(|(e, s)| (s - e).abs() / e.max(1e-12))
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max);
    println!("3000 x 15, coherent rows; rank {}", approx.rank);
    println!(
        "  sum of scores: exact {:.4}  approx {:.4}",
        exact.iter().sum::<f64>(),
        approx.sum()
    );
    println!("  worst relative error {worst:.3} (target 0.3)");
    let mut top: Vec<(usize, f64)> = exact.iter().copied().enumerate().collect();
    top.sort_by(|x, y| y.1.total_cmp(&x.1));
    for &(i, e) in &top[..5] {
        println!("  row {i:>4}  exact {e:.4}  approx {:.4}", approx.scores[i]);
    }
    let probs = sampling_probs_from_scores(&approx.scores, approx.rank)?;
    println!(
        "  sampling probs sum {:.6}, largest {:.4}",
        probs.iter().sum::<f64>(),
        top_prob(&probs)
    );
    Ok(())
}

fn top_prob(p: &[f64]) -> f64 {
    p.iter().copied().fold(0.0, f64::max)
}
