//! Every module invariant as a deterministic check over fixed seeds.
//! `tests/properties.rs` runs each as a test; the acceptance suite runs them
//! all as one criterion.

use nalgebra::DVector;
use sketchnla::bench::{bench_matrix, run_bench, BenchConfig, BenchRecord};
use sketchnla::io::{load_matrix_market, parse_matrix_market, write_sparse_matrix_market};
use sketchnla::leverage::approx_leverage_scores;
use sketchnla::linalg::{
    best_rank_k, exact_least_squares, exact_leverage_scores, orthonormality_defect,
};
use sketchnla::lowrank::{low_rank_with, low_rank_with_sketches, LowRankConfig, Strategy};
use sketchnla::lp::{
    condition_basis, lp_regress, lp_sampling_probs, lp_solve_full, norm_slack, solve_on_coreset,
    LpParams,
};
use sketchnla::regress::{
    cgnr_solve, generalized_regression, nonneg_regression, precondition, richardson_solve,
    sketch_solve_ls, sketch_solve_with, Coreset, Preconditioner,
};
use sketchnla::sketch::{
    make_full_srht, make_gaussian_jl, make_generalized_sparse_embedding, make_leverage_sampler,
    make_sparse_embedding, make_srht, reset_scatter_op_count, scatter_op_count,
};
use sketchnla::synth::{
    gaussian, ill_conditioned, planted_spectrum, regression_rhs, sparse_random,
};
use sketchnla::verify::{
    basis_distortion, column_space_basis, matrix_product_error, sampled_distortion,
};
use sketchnla::{DenseMatrix, SketchOperator, SparseMatrix, Tolerances};

use super::{leverage_oracle, ls_oracle, median, sparse, tail_energy};

pub type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        // a NaN comparison counts as a failure
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub type CheckFn = fn() -> Check;

/// `(name, check)` for every invariant, in module order.
pub fn all() -> Vec<(&'static str, CheckFn)> {
    vec![
        ("matrix: sparse/dense/mtx round trips", matrix_round_trips),
        ("matrix: normal equations", normal_equations),
        ("matrix: Pythagorean identity", pythagorean),
        (
            "matrix: exact leverage invariants",
            exact_leverage_invariants,
        ),
        ("sketch: determinism", sketch_determinism),
        ("sketch: unbiasedness", sketch_unbiasedness),
        ("sketch: sparse embedding structure", sparse_structure),
        ("sketch: generalized column norms", generalized_column_norms),
        ("sketch: one multiply-add per nonzero", one_op_per_nonzero),
        ("verify: spectral >= sampled", spectral_dominates_sampled),
        ("verify: basis invariance", distortion_basis_invariance),
        (
            "verify: distortion <= product error",
            distortion_below_product_error,
        ),
        (
            "regress: residuals from original data",
            residuals_recomputed,
        ),
        (
            "regress: full isometry equals exact",
            full_isometry_regression,
        ),
        ("regress: preconditioner bound", preconditioner_bound),
        ("regress: Richardson contraction", richardson_contraction),
        ("regress: CGNR monotone", cgnr_monotone),
        ("leverage: median amplification", median_amplification),
        ("leverage: basis independence", leverage_basis_independence),
        ("leverage: sum bounds", leverage_sum_bounds),
        ("lowrank: err >= delta_k", lowrank_lower_bound),
        ("lowrank: factor structure", lowrank_factor_structure),
        (
            "lowrank: full isometry equals best rank k",
            lowrank_full_isometry,
        ),
        ("lowrank: grid monotonicity", lowrank_grid_monotone),
        ("lp: full coreset equals plain solve", lp_full_coreset),
        ("lp: residual scales with b", lp_scale_invariance),
        ("lp: sampling slack direction", lp_slack_direction),
        ("cli: reproducible output", bench_reproducible),
        ("cli: cond_su cap respected", bench_cap_respected),
    ]
}

pub fn matrix_round_trips() -> Check {
    let dir = ok(tempfile::tempdir())?;
    for seed in 0..20 {
        let a = sparse_random(40 + seed as usize, 9, 0.15, seed);
        ensure!(
            SparseMatrix::from_dense(&a.to_dense()) == a,
            "dense round trip, seed {seed}"
        );
        let path = dir.path().join(format!("m{seed}.mtx"));
        ok(write_sparse_matrix_market(&path, &a))?;
        ensure!(
            ok(load_matrix_market(&path))? == a,
            "mtx round trip, seed {seed}"
        );
    }
    let sym = ok(parse_matrix_market(
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n2 1 4.5\n3 3 1\n",
    ))?;
    ensure!(
        SparseMatrix::from_dense(&sym.to_dense()) == sym,
        "symmetric input round trip"
    );
    Ok(())
}

pub fn normal_equations() -> Check {
    for seed in 0..20 {
        let a = sparse_random(80, 6, 0.3, seed);
        let b = gaussian(80, 2, seed + 100);
        let x = ok(exact_least_squares(&a, &b, &Tolerances::default()))?;
        let g = ok(a.tr_mul_dense(&(ok(a.mul_dense(&x))? - &b)))?;
        let bound = 1e-8 * a.frobenius_norm() * b.norm();
        ensure!(
            g.amax() <= bound,
            "seed {seed}: ‖Aᵀr‖max = {:e} > {bound:e}",
            g.amax()
        );
    }
    Ok(())
}

pub fn pythagorean() -> Check {
    for seed in 0..20 {
        let a = sparse_random(60, 5, 0.4, seed);
        let b = gaussian(60, 1, seed + 1);
        let xs = ok(exact_least_squares(&a, &b, &Tolerances::default()))?;
        let x = gaussian(5, 1, seed + 2);
        let lhs = (ok(a.mul_dense(&x))? - &b).norm_squared();
        let rhs = ok(a.mul_dense(&(&x - &xs)))?.norm_squared()
            + (ok(a.mul_dense(&xs))? - &b).norm_squared();
        ensure!(
            (lhs - rhs).abs() <= 1e-8 * lhs,
            "seed {seed}: {lhs} vs {rhs}"
        );
    }
    Ok(())
}

pub fn exact_leverage_invariants() -> Check {
    let tol = Tolerances::default();
    for seed in 0..20 {
        // rank 4 inside 7 columns
        let a = planted_spectrum(50, 7, &[3.0, 2.0, 1.0, 0.5], 0.5, seed);
        let s = ok(exact_leverage_scores(&sparse(&a), &tol))?;
        let sum: f64 = s.iter().sum();
        ensure!((sum - 4.0).abs() < 1e-8, "seed {seed}: sum {sum}");
        ensure!(
            s.iter().all(|&u| (-1e-12..=1.0 + 1e-12).contains(&u)),
            "seed {seed}: score outside [0, 1]"
        );
        let m = gaussian(7, 7, seed + 50);
        let s2 = ok(exact_leverage_scores(&sparse(&(&a * m)), &tol))?;
        let gap = s
            .iter()
            .zip(&s2)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        ensure!(gap < 1e-8, "seed {seed}: basis dependence {gap:e}");
        let oracle = leverage_oracle(&a);
        let gap = s
            .iter()
            .zip(&oracle)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        ensure!(gap < 1e-8, "seed {seed}: oracle gap {gap:e}");
    }
    Ok(())
}

fn families(n: usize, seed: u64) -> Vec<(&'static str, SketchOperator)> {
    let probs: Vec<f64> = (0..n).map(|i| (1 + i % 5) as f64).collect();
    let total: f64 = probs.iter().sum();
    let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
    vec![
        ("sparse", make_sparse_embedding(n, 16, seed).unwrap()),
        (
            "generalized",
            make_generalized_sparse_embedding(n, 3, 0.5, 0.1, seed).unwrap(),
        ),
        ("srht", make_srht(n, 16, seed).unwrap()),
        ("sampler", make_leverage_sampler(&probs, 16, seed).unwrap()),
        ("gaussian", make_gaussian_jl(16, n, seed).unwrap()),
    ]
}

pub fn sketch_determinism() -> Check {
    for seed in 0..10 {
        for ((name, a), (_, b)) in families(48, seed).into_iter().zip(families(48, seed)) {
            ensure!(
                a.materialize() == b.materialize(),
                "{name}: seed {seed} not reproducible"
            );
            ensure!(a == b, "{name}: operators differ");
        }
    }
    Ok(())
}

pub fn sketch_unbiasedness() -> Check {
    let n = 48;
    let x = DenseMatrix::from_fn(n, 1, |i, _| ((i * 7) % 11) as f64 - 5.0);
    let target = x.norm_squared();
    for (k, name) in ["sparse", "generalized", "srht", "sampler", "gaussian"]
        .iter()
        .enumerate()
    {
        let trials = 10_000;
        let mean = (0..trials)
            .map(|s| {
                let op = families(n, s).swap_remove(k).1;
                op.apply_left(&x).unwrap().norm_squared()
            })
            .sum::<f64>()
            / trials as f64;
        ensure!(
            (mean / target - 1.0).abs() <= 0.02,
            "{name}: E‖Sx‖²/‖x‖² = {}",
            mean / target
        );
    }
    Ok(())
}

pub fn sparse_structure() -> Check {
    for seed in 0..20 {
        let m = ok(make_sparse_embedding(100, 12, seed))?.materialize();
        for j in 0..100 {
            let nz: Vec<f64> = m.column(j).iter().copied().filter(|v| *v != 0.0).collect();
            ensure!(
                nz.len() == 1 && nz[0].abs() == 1.0,
                "seed {seed}, column {j}: {nz:?}"
            );
        }
    }
    Ok(())
}

pub fn generalized_column_norms() -> Check {
    for seed in 0..20 {
        let m = ok(make_generalized_sparse_embedding(300, 4, 0.5, 0.05, seed))?.materialize();
        for (j, c) in m.column_iter().enumerate() {
            ensure!(
                (c.norm() - 1.0).abs() < 1e-12,
                "seed {seed}, column {j}: norm {}",
                c.norm()
            );
        }
    }
    Ok(())
}

pub fn one_op_per_nonzero() -> Check {
    for seed in 0..10 {
        let a = sparse_random(500, 8, 0.05 + 0.02 * seed as f64, seed);
        let s = ok(make_sparse_embedding(500, 32, seed))?;
        reset_scatter_op_count();
        ok(s.apply_left(&a))?;
        ensure!(
            scatter_op_count() == a.nnz() as u64,
            "{} ops for {} nonzeros",
            scatter_op_count(),
            a.nnz()
        );
    }
    Ok(())
}

pub fn spectral_dominates_sampled() -> Check {
    for seed in 0..20 {
        let u = ok(column_space_basis(&gaussian(200, 5, seed)))?;
        let s = ok(make_sparse_embedding(200, 60, seed))?;
        let spectral = ok(basis_distortion(&s, &u))?.eps_measured;
        let sampled = ok(sampled_distortion(&s, &u, 1000, seed))?;
        ensure!(
            spectral >= sampled - 1e-12,
            "seed {seed}: {spectral} < {sampled}"
        );
        ensure!(
            sampled >= 0.2 * spectral,
            "seed {seed}: sampling gap too wide ({sampled} vs {spectral})"
        );
    }
    Ok(())
}

pub fn distortion_basis_invariance() -> Check {
    for seed in 0..20 {
        let u = ok(column_space_basis(&gaussian(150, 4, seed)))?;
        let (rot, _) = gaussian(4, 4, seed + 7).qr().unpack();
        let s = ok(make_srht(150, 40, seed))?;
        let e1 = ok(basis_distortion(&s, &u))?.eps_measured;
        let e2 = ok(basis_distortion(&s, &(&u * rot)))?.eps_measured;
        ensure!((e1 - e2).abs() <= 1e-10, "seed {seed}: {e1} vs {e2}");
    }
    Ok(())
}

pub fn distortion_below_product_error() -> Check {
    for seed in 0..20 {
        let u = ok(column_space_basis(&gaussian(150, 4, seed)))?;
        let s = ok(make_sparse_embedding(150, 50, seed))?;
        let eps = ok(basis_distortion(&s, &u))?.eps_measured;
        // the relative product error is normalized by ‖U‖²_F = r
        let fro = ok(matrix_product_error(&s, &u, &u))? * 4.0;
        ensure!(eps <= fro + 1e-12, "seed {seed}: {eps} > {fro}");
    }
    Ok(())
}

pub fn residuals_recomputed() -> Check {
    for seed in 0..5 {
        let a = gaussian(300, 4, seed);
        let b = regression_rhs(&a, 0.5, seed);
        let sa = sparse(&a);
        let pre = ok(precondition(&sa, 0.25, seed))?;
        let sols = vec![
            ok(sketch_solve_ls(&sa, &b, 0.5, seed))?,
            ok(generalized_regression(&sa, &b, 0.5, seed))?.0,
            ok(richardson_solve(&sa, &pre, &b, 0.1, 100))?,
            ok(cgnr_solve(&sa, &pre, &b, 0.1, 100))?,
            ok(nonneg_regression(&sa, &b, 0.5, seed))?,
        ];
        for sol in sols {
            let r = (&a * &sol.x - &b).norm();
            ensure!(
                (sol.residual_norm - r).abs() <= 1e-12 * r,
                "{:?}: reported {} vs {r}",
                sol.method,
                sol.residual_norm
            );
        }
        let lp = ok(lp_regress(
            &sa,
            &b,
            &ok(LpParams::new(300, 5, 1.0, 0.5, seed))?,
        ))?;
        let r1: f64 = (&a * &lp.x - &b).iter().map(|v| v.abs()).sum();
        ensure!(
            (lp.residual_norm - r1).abs() <= 1e-10 * r1,
            "lp: reported {} vs {r1}",
            lp.residual_norm
        );
    }
    Ok(())
}

pub fn full_isometry_regression() -> Check {
    for seed in 0..10 {
        let a = gaussian(120, 5, seed);
        let b = regression_rhs(&a, 1.0, seed);
        let sol = ok(sketch_solve_with(
            &sparse(&a),
            &b,
            &ok(make_full_srht(120, seed))?,
        ))?;
        let x = ls_oracle(&a, &b);
        ensure!(
            (&sol.x - &x).amax() <= 1e-10,
            "seed {seed}: gap {:e}",
            (&sol.x - &x).amax()
        );
    }
    Ok(())
}

pub fn preconditioner_bound() -> Check {
    let eps0 = 0.25;
    let bound = (1.0 + eps0) / (1.0 - eps0);
    let mut hits = 0;
    for seed in 0..100 {
        let a = ill_conditioned(8000, 8, 1e6, seed);
        let pre = ok(precondition(&sparse(&a), eps0, seed))?;
        if super::cond(&(&a * &pre.r_inv)) <= bound {
            hits += 1;
        }
    }
    ensure!(hits >= 90, "κ(A R⁻¹) <= {bound:.3} in {hits}/100 seeds");
    Ok(())
}

/// Largest ratio of consecutive errors `‖A(x_{k+1} − x*)‖ / ‖A(x_k − x*)‖`
/// of Richardson with `pre`.
pub fn richardson_rate(
    a: &DenseMatrix,
    b: &DenseMatrix,
    pre: &Preconditioner,
    iters: usize,
) -> f64 {
    let xs = ls_oracle(a, b);
    let mut prev = (a * &xs).norm();
    let mut worst: f64 = 0.0;
    for it in 1..=iters {
        let x = richardson_solve(&sparse(a), pre, b, 1e-300, it).unwrap().x;
        let e = (a * (x - &xs)).norm();
        // ratios between roundoff-level errors carry no information
        if prev > 1e-10 * (a * &xs).norm() {
            worst = worst.max(e / prev);
        }
        prev = e;
    }
    worst
}

pub fn richardson_contraction() -> Check {
    let eps0 = 0.25;
    let mut hits = 0;
    for seed in 0..20 {
        let a = ill_conditioned(8000, 6, 1e6, seed);
        let b = regression_rhs(&a, 0.1, seed);
        let pre = ok(precondition(&sparse(&a), eps0, seed))?;
        if richardson_rate(&a, &b, &pre, 8) <= 3.0 * eps0 + 0.05 {
            hits += 1;
        }
    }
    ensure!(
        hits >= 18,
        "contraction <= 3 eps0 + 0.05 in {hits}/20 seeds"
    );
    Ok(())
}

pub fn cgnr_monotone() -> Check {
    for seed in 0..20 {
        let a = ill_conditioned(400, 6, 1e3, seed);
        let b = regression_rhs(&a, 1.0, seed);
        let sa = sparse(&a);
        let sol = ok(cgnr_solve(
            &sa,
            &ok(precondition(&sa, 0.5, seed))?,
            &b,
            1e-12,
            60,
        ))?;
        for w in sol.residual_history.windows(2) {
            ensure!(
                w[1] <= w[0] * (1.0 + 1e-12),
                "seed {seed}: {} -> {}",
                w[0],
                w[1]
            );
        }
    }
    Ok(())
}

fn leverage_success(a: &DenseMatrix, exact: &[f64], eps: f64, reps: usize, seed: u64) -> bool {
    let est = approx_leverage_scores(&sparse(a), eps, reps, seed).unwrap();
    est.scores
        .iter()
        .zip(exact)
        .all(|(e, u)| (e - u).abs() <= eps * u + 1e-12)
}

pub fn median_amplification() -> Check {
    let a = super::coherent_instance(3).rows(0, 500).into_owned();
    let exact = leverage_oracle(&a);
    let eps = 0.2;
    let rates: Vec<usize> = [1, 3, 5]
        .iter()
        .map(|&reps| {
            (0..100)
                .filter(|&s| leverage_success(&a, &exact, eps, reps, s))
                .count()
        })
        .collect();
    ensure!(
        rates.windows(2).all(|w| w[1] >= w[0]),
        "success counts by repetitions 1/3/5: {rates:?}"
    );
    Ok(())
}

pub fn leverage_basis_independence() -> Check {
    let eps = 0.5;
    for seed in 0..20 {
        let a = gaussian(400, 6, seed);
        let m = gaussian(6, 6, seed + 9);
        let s1 = ok(approx_leverage_scores(&sparse(&a), eps, 3, seed))?;
        let s2 = ok(approx_leverage_scores(&sparse(&(&a * m)), eps, 3, seed + 1))?;
        for (i, (x, y)) in s1.scores.iter().zip(&s2.scores).enumerate() {
            ensure!(
                (x - y).abs() <= 2.0 * eps * x.max(*y),
                "seed {seed}, row {i}: {x} vs {y}"
            );
        }
    }
    Ok(())
}

pub fn leverage_sum_bounds() -> Check {
    let eps = 0.5;
    for seed in 0..20 {
        let a = super::coherent_instance(seed).rows(0, 400).into_owned();
        let exact = leverage_oracle(&a);
        let est = ok(approx_leverage_scores(&sparse(&a), eps, 5, seed))?;
        let holds = est
            .scores
            .iter()
            .zip(&exact)
            .all(|(e, u)| (e - u).abs() <= eps * u + 1e-12);
        if holds {
            let r = 10.0;
            ensure!(
                ((1.0 - eps) * r..=(1.0 + eps) * r).contains(&est.sum()),
                "seed {seed}: sum {} outside [{}, {}]",
                est.sum(),
                (1.0 - eps) * r,
                (1.0 + eps) * r
            );
        }
    }
    Ok(())
}

fn planted(seed: u64) -> DenseMatrix {
    planted_spectrum(
        120,
        90,
        &sketchnla::synth::head_tail_spectrum(4, 40, 0.3, 0.9),
        0.3,
        seed,
    )
}

pub fn lowrank_lower_bound() -> Check {
    for seed in 0..10 {
        let a = planted(seed);
        let delta = tail_energy(&a, 4);
        for strategy in [Strategy::SrhtCompose, Strategy::LeverageSample] {
            let out = ok(low_rank_with(
                &sparse(&a),
                &LowRankConfig::new(4, 0.5).with_strategy(strategy),
                seed,
            ))?;
            ensure!(
                out.err >= delta - 1e-10,
                "seed {seed}, {strategy:?}: err {} < Δ_k {delta}",
                out.err
            );
        }
    }
    Ok(())
}

pub fn lowrank_factor_structure() -> Check {
    for seed in 0..10 {
        let a = planted(seed);
        let out = ok(low_rank_with(
            &sparse(&a),
            &LowRankConfig::new(4, 0.5),
            seed,
        ))?;
        let f = &out.factors;
        ensure!(orthonormality_defect(&f.l) < 1e-10, "L not orthonormal");
        ensure!(orthonormality_defect(&f.w) < 1e-10, "W not orthonormal");
        ensure!(
            f.d.len() == 4 && f.d.windows(2).all(|w| w[0] >= w[1]) && f.d.iter().all(|&d| d >= 0.0),
            "bad D {:?}",
            f.d
        );
        let sv = super::singular_values(&f.to_dense());
        let rank = sv.iter().filter(|&&s| s > 1e-10 * sv[0]).count();
        ensure!(rank <= 4, "rank {rank} > k");
    }
    Ok(())
}

pub fn lowrank_full_isometry() -> Check {
    for seed in 0..5 {
        let a = planted(seed);
        let sa = sparse(&a);
        let out = ok(low_rank_with_sketches(
            &sa,
            4,
            &ok(make_full_srht(90, seed))?,
            &ok(make_full_srht(120, seed + 1))?,
        ))?;
        let (_, delta) = ok(best_rank_k(&sa, 4))?;
        ensure!(
            (out.err - delta).abs() <= 1e-8 * a.norm(),
            "seed {seed}: {} vs {delta}",
            out.err
        );
    }
    Ok(())
}

pub fn lowrank_grid_monotone() -> Check {
    let a = sparse(&planted_spectrum(
        300,
        200,
        &sketchnla::synth::head_tail_spectrum(5, 60, 0.3, 0.93),
        0.3,
        11,
    ));
    let cfg = BenchConfig {
        k: 5,
        trials: 15,
        seed: 4,
        ..BenchConfig::default()
    };
    let recs = ok(bench_matrix("fixed", &a, &cfg))?;
    let meds = medians_by_tr(&recs);
    ensure!(
        meds.windows(2).all(|w| w[1].1 <= w[0].1),
        "median err ratio by t_R: {meds:?}"
    );
    Ok(())
}

/// `(t_R, median err_ratio_minus_1)` in increasing `t_R`.
pub fn medians_by_tr(recs: &[BenchRecord]) -> Vec<(usize, f64)> {
    let mut trs: Vec<usize> = recs.iter().map(|r| r.t_r).collect();
    trs.sort();
    trs.dedup();
    trs.into_iter()
        .map(|t| {
            (
                t,
                median(
                    recs.iter()
                        .filter(|r| r.t_r == t)
                        .map(|r| r.err_ratio_minus_1)
                        .collect(),
                ),
            )
        })
        .collect()
}

pub fn lp_full_coreset() -> Check {
    for seed in 0..5 {
        let a = gaussian(80, 3, seed);
        let b = regression_rhs(&a, 1.0, seed);
        let full = Coreset {
            rows: (0..80).map(|i| (i, 1.0)).collect(),
            size: 80,
        };
        for p in [1.0, 1.5, 2.0, 3.0] {
            let sol = ok(solve_on_coreset(&sparse(&a), &b, &full, p))?;
            let (x, _) = ok(lp_solve_full(
                &a,
                &DVector::from_column_slice(b.as_slice()),
                p,
            ))?;
            ensure!(
                sol.x.as_slice() == x.as_slice(),
                "seed {seed}, p {p}: coreset solve differs"
            );
        }
    }
    Ok(())
}

pub fn lp_scale_invariance() -> Check {
    for seed in 0..5 {
        let a = gaussian(200, 3, seed);
        let b = regression_rhs(&a, 1.0, seed);
        let sa = sparse(&a);
        for p in [1.0, 1.5, 3.0] {
            let params = ok(LpParams::new(200, 4, p, 0.5, seed))?;
            let r1 = ok(lp_regress(&sa, &b, &params))?.residual_norm;
            let r2 = ok(lp_regress(&sa, &(&b * 7.5), &params))?.residual_norm;
            ensure!(
                (r2 / (7.5 * r1) - 1.0).abs() <= 1e-6,
                "seed {seed}, p {p}: {r1} vs {r2}"
            );
        }
    }
    Ok(())
}

pub fn lp_slack_direction() -> Check {
    // the documented noise allowance for a 24-column Gaussian probe
    let noise = 3.0;
    for seed in 0..10 {
        let a = sparse(&gaussian(300, 30, seed));
        for p in [1.0, 3.0] {
            let params = ok(LpParams::new(300, 30, p, 0.5, seed))?;
            let basis = ok(condition_basis(&a, &params))?;
            let (exact, s0) = ok(lp_sampling_probs(&a, &basis, &params, 1000))?;
            let (est, slack) = ok(lp_sampling_probs(&a, &basis, &params, 24))?;
            ensure!(
                s0 == 1.0 && slack == norm_slack(30, p),
                "slack reported as {slack}"
            );
            for (i, (e, x)) in est.iter().zip(&exact).enumerate() {
                ensure!(
                    e * slack * noise >= *x,
                    "seed {seed}, p {p}, row {i}: {e} vs exact {x}"
                );
            }
        }
    }
    Ok(())
}

fn small_corpus(dir: &std::path::Path) -> std::result::Result<Vec<std::path::PathBuf>, String> {
    let spec = sketchnla::synth::CorpusSpec {
        count: 3,
        n_range: (80, 120),
        d_range: (50, 60),
        k: 3,
        seed: 5,
    };
    ok(sketchnla::synth::write_corpus(dir, &spec))
}

pub fn bench_reproducible() -> Check {
    let dir = ok(tempfile::tempdir())?;
    let paths = small_corpus(dir.path())?;
    let cfg = BenchConfig {
        k: 3,
        trials: 2,
        seed: 8,
        ..BenchConfig::default()
    };
    let strip = |buf: Vec<u8>| -> String {
        // drop the wall_ms column (last)
        String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut b1 = Vec::new();
    let mut b2 = Vec::new();
    ok(run_bench(&paths, &cfg, &mut b1))?;
    ok(run_bench(
        &paths,
        &BenchConfig {
            jobs: 2,
            ..cfg.clone()
        },
        &mut b2,
    ))?;
    ensure!(strip(b1) == strip(b2), "bench CSV differs between runs");

    let input = dir.path().join("synth_000.mtx");
    let run = |out: &std::path::Path| {
        sketchnla::cli::run([
            "sketchnla",
            "leverage",
            "--input",
            input.to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
    };
    let (o1, o2) = (dir.path().join("l1.csv"), dir.path().join("l2.csv"));
    ensure!(run(&o1) == 0 && run(&o2) == 0, "leverage command failed");
    ensure!(
        ok(std::fs::read(&o1))? == ok(std::fs::read(&o2))?,
        "leverage CSV differs between runs"
    );
    Ok(())
}

pub fn bench_cap_respected() -> Check {
    let dir = ok(tempfile::tempdir())?;
    let paths = small_corpus(dir.path())?;
    for (target, ratio) in [(1.2, 110), (1.01, 3)] {
        let cfg = BenchConfig {
            k: 3,
            trials: 2,
            cond_target: target,
            t_s_cap_ratio: ratio,
            ..BenchConfig::default()
        };
        let s = ok(run_bench(&paths, &cfg, std::io::sink()))?;
        for r in &s.records {
            ensure!(
                r.capped || r.cond_su <= target,
                "{r:?} exceeds {target} without the capped flag"
            );
            ensure!(
                r.cond_su >= 1.0 && r.err_ratio_minus_1 >= -1e-9,
                "{r:?} violates record invariants"
            );
        }
    }
    Ok(())
}
