//! Measures how well each sketch family preserves the column space of a
//! tall matrix: the largest `|‖SAx‖² − ‖Ax‖²| / ‖Ax‖²` over all `x`.
//!
//! ```text
//! cargo run --release --example subspace_embedding
//! ```

use sketchnla::sketch::{
    default_sparse_dim, make_gaussian_jl, make_generalized_sparse_embedding, make_sparse_embedding,
    make_srht, srht_dim,
};
use sketchnla::synth::{gaussian, identity_block};
use sketchnla::verify::max_distortion;

fn main() -> sketchnla::Result<()> {
    let (n, d, eps, seed) = (4000, 10, 0.5, 7);
    let inputs = [
        ("gaussian", gaussian(n, d, seed)),
        ("identity block", identity_block(n, d, 100.0, seed)),
    ];
    let t_sparse = default_sparse_dim(d, eps);
    let t_srht = srht_dim(d, eps, n);
    let sketches = [
        (
            "sparse embedding",
            make_sparse_embedding(n, t_sparse, seed)?,
        ),
        (
            "generalized",
            make_generalized_sparse_embedding(n, d, eps, 0.05, seed)?,
        ),
        ("srht", make_srht(n, t_srht, seed)?),
        ("gaussian jl", make_gaussian_jl(t_srht, n, seed)?),
    ];
    println!("{n} x {d} inputs, target distortion {eps}");
    for (name, s) in &sketches {
        for (kind, a) in &inputs {
            let r = max_distortion(s, a)?;
            println!(
                "  {name:<17} t {:>5}  {kind:<14} distortion {:.3}  sigma in [{:.3}, {:.3}]",
                r.t, r.eps_measured, r.sigma_min, r.sigma_max
            );
        }
    }
    Ok(())
}
