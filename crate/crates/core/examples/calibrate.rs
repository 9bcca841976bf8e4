//! Sweeps behind the leading constants in `sketchnla::constants`.
//!
//! Each sweep prints one row per candidate: the resulting sketch size and the
//! success count over seeds `1000..1100`, disjoint from the seeds the test
//! suites use. Pick the smallest size that clears the target with margin.
//!
//! ```text
//! cargo run --release --example calibrate -- [sparse|generalized|lowrank|all]
//! ```

use sketchnla::lowrank::{low_rank_with, LowRankConfig};
use sketchnla::sketch::{
    default_sparse_dim, make_sparse_embedding, GeneralizedSparseEmbedding, SketchOperator,
};
use sketchnla::synth::{gaussian, head_tail_spectrum, identity_block, planted_spectrum};
use sketchnla::verify::max_distortion;
use sketchnla::{DenseMatrix, SparseMatrix};

const SEEDS: std::ops::Range<u64> = 1000..1100;

fn instances(seed: u64, d: usize) -> [DenseMatrix; 2] {
    [
        gaussian(1000, d, seed),
        identity_block(1000, d, 100.0, seed),
    ]
}

fn successes(make: impl Fn(u64) -> SketchOperator, d: usize, eps: f64) -> [usize; 2] {
    let mut hits = [0; 2];
    for seed in SEEDS {
        let s = make(seed);
        for (h, a) in hits.iter_mut().zip(instances(seed, d)) {
            *h += usize::from(max_distortion(&s, &a).unwrap().eps_measured <= eps);
        }
    }
    hits
}

/// Target: 90/100 at distortion `eps` on both families.
fn sparse() {
    println!("sparse embedding (current constants give t = default_sparse_dim)");
    for r in [5, 10, 20] {
        let base = default_sparse_dim(r, 0.5);
        for frac in [0.5, 0.75, 1.0] {
            let t = (base as f64 * frac) as usize;
            let [g, c] = successes(|s| make_sparse_embedding(1000, t, s).unwrap(), r, 0.5);
            println!("  r {r:>2}  t {t:>5}  gaussian {g:>3}  coherent {c:>3}");
        }
    }
}

/// Target: 95/100 at distortion 0.5 for `r = 10`, `delta = 0.05`.
fn generalized() {
    let (r, eps, delta) = (10.0f64, 0.5, 0.05);
    println!("generalized embedding, r = 10, eps = 0.5, delta = 0.05");
    for k_scale in [0.25, 0.5, 0.75] {
        for v_scale in [2.0, 3.0, 4.0] {
            for q_scale in [0.05, 0.1] {
                let k = (k_scale * (r / (eps * delta)).ln() / eps).ceil() as usize;
                let v = (v_scale / eps).ceil() as usize;
                let q =
                    (q_scale * r * (r + (1.0 / (delta * eps)).ln()) / (eps * eps)).ceil() as usize;
                let make = |s| {
                    SketchOperator::Generalized(
                        GeneralizedSparseEmbedding::with_params(1000, q, k, v, s).unwrap(),
                    )
                };
                let [g, c] = successes(make, 10, 0.5);
                println!(
                    "  k_scale {k_scale:.2} v_scale {v_scale:.1} q_scale {q_scale:.2}  (q {q:>3}, k {k}, v {v}, t {:>4})  gaussian {g:>3}  coherent {c:>3}",
                    q * k * v
                );
            }
        }
    }
}

/// Target: err <= 1.5 Δ_k in 90/100 on the planted 400 x 300 instance.
fn lowrank() {
    println!("low-rank, planted 400 x 300, k = 5, eps = 0.5 (default sizes)");
    let sigma = head_tail_spectrum(5, 60, 0.2, 0.95);
    let mut hits = 0;
    for seed in SEEDS {
        let a = planted_spectrum(400, 300, &sigma, 0.3, seed);
        let sa = SparseMatrix::from_dense(&a);
        let delta = sketchnla::linalg::best_rank_k(&sa, 5).unwrap().1;
        let out = low_rank_with(&sa, &LowRankConfig::new(5, 0.5), seed).unwrap();
        hits += usize::from(out.err <= 1.5 * delta);
    }
    println!("  err <= 1.5 delta_k in {hits}/100");
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    match which.as_str() {
        "sparse" => sparse(),
        "generalized" => generalized(),
        "lowrank" => lowrank(),
        "all" => {
            sparse();
            generalized();
            lowrank();
        }
        other => {
            eprintln!("unknown sweep {other}; expected sparse, generalized, lowrank or all");
            std::process::exit(2);
        }
    }
}
