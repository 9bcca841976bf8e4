//! l1 and l2 regression on a coreset drawn from a well-conditioned basis,
//! against the full IRLS solve, with heavy-tailed noise in `b`.
//!
//! ```text
//! cargo run --release --example lp_regression
//! ```

use nalgebra::DVector;
use sketchnla::lp::{lp_norm, lp_regress_with_coreset, lp_solve_full, LpParams};
use sketchnla::synth::gaussian;
use sketchnla::{DenseMatrix, SparseMatrix};

fn main() -> sketchnla::Result<()> {
    let (n, d) = (4000, 6);
    let dense = gaussian(n, d, 8);
    let noise = gaussian(n, 1, 9).map(|z| z.powi(3));
    let b: DenseMatrix = &dense * gaussian(d, 1, 10) + noise;
    let a = SparseMatrix::from_dense(&dense);
    for p in [1.0, 2.0] {
        let (x_full, report) = lp_solve_full(&dense, &DVector::from_column_slice(b.as_slice()), p)?;
        let opt = lp_norm((&dense * &x_full - b.column(0)).as_slice(), p);
        let params = LpParams::new(n, d + 1, p, 0.5, 12)?;
        let (sol, coreset) = lp_regress_with_coreset(&a, &b, &params)?;
        println!(
            "p = {p}: full IRLS {} iterations, optimum {opt:.2}; coreset {} rows, residual / optimum {:.4}",
            report.iterations,
            coreset.size,
            sol.residual_norm / opt
        );
    }
    Ok(())
}
