//! Solves an ill-conditioned least-squares problem with CGNR and Richardson
//! after sketch-based preconditioning, printing the residual histories.
//!
//! ```text
//! cargo run --release --example preconditioned_solve
//! ```

use sketchnla::linalg::condition_number;
use sketchnla::regress::{cgnr_solve, precondition, richardson_solve, DEFAULT_MAX_ITER};
use sketchnla::synth::{ill_conditioned, regression_rhs};
use sketchnla::SparseMatrix;

fn main() -> sketchnla::Result<()> {
    let dense = ill_conditioned(5000, 20, 1e8, 5);
    let b = regression_rhs(&dense, 0.0, 6);
    let a = SparseMatrix::from_dense(&dense);
    let pre = precondition(&a, 0.5, 9)?;
    let conditioned = &dense * &pre.r_inv;
    println!(
        "κ(A) {:.2e}  κ(A R⁻¹) {:.3}  sketch rows {}",
        condition_number(&dense),
        condition_number(&conditioned),
        pre.sketch_dim
    );
    for (name, sol) in [
        ("cgnr", cgnr_solve(&a, &pre, &b, 1e-10, DEFAULT_MAX_ITER)?),
        (
            "richardson",
            richardson_solve(&a, &pre, &b, 1e-10, DEFAULT_MAX_ITER)?,
        ),
    ] {
        let head: Vec<String> = sol
            .residual_history
            .iter()
            .take(6)
            .map(|r| format!("{r:.1e}"))
            .collect();
        println!(
            "  {name:<10} {:>3} iterations  final residual {:.2e}  history {}",
            sol.iterations,
            sol.residual_norm,
            head.join(" ")
        );
    }
    Ok(())
}
