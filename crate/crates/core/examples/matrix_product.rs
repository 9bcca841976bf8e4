//! Approximates `AᵀB` by `AᵀSᵀSB` and reports the relative Frobenius error
//! as the sketch grows. The error should fall roughly like `1/sqrt(t)`.
//!
//! ```text
//! cargo run --release --example matrix_product
//! ```

use sketchnla::sketch::{make_sparse_embedding, make_srht};
use sketchnla::synth::gaussian;
use sketchnla::verify::{frobenius_error, matrix_product_error};

fn main() -> sketchnla::Result<()> {
    let n = 2048;
    let a = gaussian(n, 20, 1);
    let b = gaussian(n, 30, 2);
    println!("relative error of A^T S^T S B, mean over 10 seeds");
    for t in [32, 128, 512] {
        let mut sums = [0.0; 3];
        for seed in 0..10 {
            let cs = make_sparse_embedding(n, t, seed)?;
            sums[0] += matrix_product_error(&cs, &a, &b)?;
            sums[1] += matrix_product_error(&make_srht(n, t, seed)?, &a, &b)?;
            sums[2] += frobenius_error(&cs, &a)?;
        }
        let [cs, srht, frob] = sums.map(|s| s / 10.0);
        println!("  t {t:>4}  countsketch {cs:.4}  srht {srht:.4}  | ‖SA‖_F² drift {frob:.4}");
    }
    Ok(())
}
