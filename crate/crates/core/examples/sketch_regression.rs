//! Sketch-and-solve least squares against the exact solution, plus the
//! leverage-score coreset and the nonnegative variant.
//!
//! ```text
//! cargo run --release --example sketch_regression
//! ```

use sketchnla::linalg::{exact_least_squares, residual_norm};
use sketchnla::regress::{generalized_regression, nonneg_regression, sketch_solve_ls};
use sketchnla::synth::{gaussian, regression_rhs};
use sketchnla::{SparseMatrix, Tolerances};

fn main() -> sketchnla::Result<()> {
    let dense = gaussian(20_000, 12, 3);
    let b = regression_rhs(&dense, 0.5, 4);
    let a = SparseMatrix::from_dense(&dense);
    let x_opt = exact_least_squares(&a, &b, &Tolerances::default())?;
    let opt = residual_norm(&a, &x_opt, &b)?;
    println!("20000 x 12, optimal residual {opt:.4}");
    for eps in [0.5, 0.25, 0.1] {
        let sol = sketch_solve_ls(&a, &b, eps, 11)?;
        println!(
            "  sketch   eps {eps:<4}  t {:>6}  residual / optimal {:.5}",
            sol.sketch_dim,
            sol.residual_norm / opt
        );
    }
    let (sol, coreset) = generalized_regression(&a, &b, 0.25, 11)?;
    println!(
        "  coreset  eps 0.25  rows {:>4}  residual / optimal {:.5}",
        coreset.size,
        sol.residual_norm / opt
    );
    let nn = nonneg_regression(&a, &b, 0.25, 11)?;
    let min = nn.x.iter().copied().fold(f64::INFINITY, f64::min);
    println!(
        "  nnls     eps 0.25  residual / unconstrained {:.5}  min x {min:.3}",
        nn.residual_norm / opt
    );
    Ok(())
}
