//! Least-squares and nonnegative solvers against SVD and brute-force oracles.

mod common;

use common::{ls_oracle, ls_residual, nnls_oracle, sparse};
use sketchnla::regress::{
    cgnr_solve, coreset_size, generalized_regression, nnls, nonneg_regression, precondition,
    richardson_solve, sketch_solve_ls, DEFAULT_MAX_ITER,
};
use sketchnla::synth::{gaussian, ill_conditioned, regression_rhs};
use sketchnla::Error;

#[test]
fn oracle_solves_a_known_system() {
    // overdetermined line fit through (0,1), (1,3), (2,5)
    let a = sketchnla::DenseMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
    let b = sketchnla::DenseMatrix::from_column_slice(3, 1, &[1.0, 3.0, 5.0]);
    let x = ls_oracle(&a, &b);
    assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
}

#[test]
fn sketch_and_solve_within_one_plus_eps() {
    let eps = 0.5;
    let hits = (0..20)
        .filter(|&seed| {
            let a = gaussian(2000, 10, seed);
            let b = regression_rhs(&a, 1.0, seed);
            let sol = sketch_solve_ls(&sparse(&a), &b, eps, seed).unwrap();
            sol.residual_norm <= (1.0 + eps) * ls_residual(&a, &b)
        })
        .count();
    assert!(hits >= 18, "{hits}/20");
}

#[test]
fn coreset_regression_within_one_plus_eps() {
    let eps = 0.5;
    let hits = (0..20)
        .filter(|&seed| {
            let a = gaussian(1500, 5, seed);
            let b = regression_rhs(&a, 1.0, seed);
            let (sol, cs) = generalized_regression(&sparse(&a), &b, eps, seed).unwrap();
            assert_eq!(cs.size, coreset_size(5, eps));
            sol.residual_norm <= (1.0 + eps) * ls_residual(&a, &b)
        })
        .count();
    assert!(hits >= 18, "{hits}/20");
}

#[test]
fn iterative_solvers_reach_the_oracle_on_ill_conditioned_input() {
    let a = ill_conditioned(8000, 8, 1e6, 3);
    let b = regression_rhs(&a, 0.1, 3);
    let sa = sparse(&a);
    let pre = precondition(&sa, 0.25, 4).unwrap();
    let opt = ls_residual(&a, &b);
    for sol in [
        richardson_solve(&sa, &pre, &b, 1e-6, DEFAULT_MAX_ITER).unwrap(),
        cgnr_solve(&sa, &pre, &b, 1e-6, DEFAULT_MAX_ITER).unwrap(),
    ] {
        assert!(
            sol.residual_norm <= opt * (1.0 + 1e-6),
            "{:?}: {} vs {opt}",
            sol.method,
            sol.residual_norm
        );
        assert!(
            sol.iterations <= 25,
            "{:?} took {}",
            sol.method,
            sol.iterations
        );
    }
}

#[test]
fn bad_preconditioner_is_reported() {
    let a = gaussian(300, 3, 1);
    let b = regression_rhs(&a, 1.0, 1);
    let mut pre = precondition(&sparse(&a), 0.5, 2).unwrap();
    pre.r_inv *= 50.0;
    assert!(matches!(
        richardson_solve(&sparse(&a), &pre, &b, 0.01, 50),
        Err(Error::Divergence(_))
    ));
}

#[test]
fn nnls_matches_brute_force() {
    for seed in 0..30 {
        let a = gaussian(25, 5, seed);
        let b = gaussian(25, 1, seed + 1000);
        let x = nnls(&a, &b).unwrap();
        let (_, best) = nnls_oracle(&a, &b);
        assert!(x.iter().all(|&v| v >= 0.0));
        let r = (&a * &x - &b).norm();
        assert!(
            r <= best * (1.0 + 1e-9) + 1e-12,
            "seed {seed}: {r} vs {best}"
        );
    }
}

#[test]
fn nonneg_regression_within_one_plus_eps_of_brute_force() {
    let eps = 0.5;
    for seed in 0..10 {
        let a = gaussian(3000, 5, seed);
        let b = regression_rhs(&a, 2.0, seed);
        let sol = nonneg_regression(&sparse(&a), &b, eps, seed).unwrap();
        let (_, best) = nnls_oracle(&a, &b);
        assert!(sol.residual_norm <= (1.0 + eps) * best, "seed {seed}");
    }
}
