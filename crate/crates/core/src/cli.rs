//! The `sketchnla` command line.
//!
//! Exit codes: 0 on success, 2 for bad flags or unreadable input, 3 when a
//! solver fails. The seed comes from `--seed`, then `SKETCHNLA_SEED`, then 0.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{
    corpus_files, excess_error, pareto_summary, run_bench, write_pareto_csv, BenchConfig,
    SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::io::{load_dense_matrix_market, load_matrix_market, write_dense_matrix_market};
use crate::leverage::approx_leverage_scores;
use crate::linalg::{best_rank_k, exact_least_squares, exact_leverage_scores, residual_norm};
use crate::lowrank::{low_rank_with, LowRankConfig, Strategy};
use crate::lp::{lp_regress_with_coreset, LpParams};
use crate::matrix::{DenseMatrix, SparseMatrix, Tolerances};
use crate::regress::{
    cgnr_solve, generalized_regression, nonneg_regression, precondition, richardson_solve,
    sketch_solve_ls, Coreset, Method, RegressionSolution,
};
use crate::synth::{write_corpus, CorpusSpec};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sketchnla",
    version,
    about = "Sketching-based regression, leverage scores and low-rank approximation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve min ‖Ax − b‖ (or its lp / nonnegative variants).
    Regress(RegressArgs),
    /// Rank-k approximation A ≈ L D Wᵀ.
    Lowrank(LowRankArgs),
    /// Approximate leverage scores as CSV.
    Leverage(LeverageArgs),
    /// Low-rank benchmark over a directory of .mtx files.
    Bench(BenchArgs),
    /// Write a synthetic benchmark corpus.
    GenCorpus(GenCorpusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Sketch,
    Coreset,
    Cgnr,
    Richardson,
    Nnls,
    Lp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    SrhtCompose,
    LeverageSample,
}

#[derive(Debug, clap::Args)]
pub struct RegressArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
    #[arg(long, value_enum, default_value = "sketch")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, env = "SKETCHNLA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Norm for `--method lp`.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Preconditioner distortion for the iterative methods.
    #[arg(long, default_value_t = 0.25)]
    pub eps0: f64,
    #[arg(long, default_value_t = crate::regress::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Overrides the lp coreset size.
    #[arg(long)]
    pub sample_size: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct LowRankArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, env = "SKETCHNLA_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "srht-compose")]
    pub strategy: StrategyArg,
    /// Also compute Δ_k by a full SVD and report err/Δ_k.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct LeverageArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    #[arg(long, env = "SKETCHNLA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Add a column with the exact scores.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, env = "SKETCHNLA_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 1.2)]
    pub cond_target: f64,
    /// Also run grid points with t_R < k.
    #[arg(long)]
    pub include_below_k: bool,
    /// Record CSV; the Pareto summary goes next to it as `<stem>.pareto.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct GenCorpusArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, env = "SKETCHNLA_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub n_min: usize,
    #[arg(long, default_value_t = 400)]
    pub n_max: usize,
    #[arg(long, default_value_t = 130)]
    pub d_min: usize,
    #[arg(long, default_value_t = 200)]
    pub d_max: usize,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 3 for failures inside a solver, 2 for everything the caller can fix.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. }
        | Error::IrlsNoConvergence { .. }
        | Error::Divergence(_)
        | Error::Degenerate(_) => EXIT_SOLVER,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Regress(a) => cmd_regress(&a),
        Command::Lowrank(a) => cmd_lowrank(&a),
        Command::Leverage(a) => cmd_leverage(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::GenCorpus(a) => cmd_gen_corpus(&a),
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_coreset_csv(path: &Path, cs: &Coreset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["row", "weight"])?;
    for (i, wt) in &cs.rows {
        w.write_record([i.to_string(), format!("{wt:?}")])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Timings {
    load_ms: f64,
    solve_ms: f64,
}

/// Contents of `telemetry.json`.
#[derive(Debug, Serialize)]
struct RegressTelemetry<'a> {
    schema: &'static str,
    n: usize,
    d: usize,
    nnz: usize,
    rhs: usize,
    eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(flatten)]
    solution: &'a RegressionSolution,
    timings: Timings,
}

fn cmd_regress(args: &RegressArgs) -> Result<()> {
    let t0 = Instant::now();
    let a = load_matrix_market(&args.input)?;
    let b = load_dense_matrix_market(&args.rhs)?;
    let load_ms = ms_since(t0);
    fs::create_dir_all(&args.out)?;

    let t1 = Instant::now();
    let mut coreset = None;
    let sol = match args.method {
        MethodArg::Exact => exact_solution(&a, &b, args.seed)?,
        MethodArg::Sketch => sketch_solve_ls(&a, &b, args.eps, args.seed)?,
        MethodArg::Coreset => {
            let (sol, cs) = generalized_regression(&a, &b, args.eps, args.seed)?;
            coreset = Some(cs);
            sol
        }
        MethodArg::Cgnr => cgnr_solve(
            &a,
            &precondition(&a, args.eps0, args.seed)?,
            &b,
            args.eps,
            args.max_iter,
        )?,
        MethodArg::Richardson => richardson_solve(
            &a,
            &precondition(&a, args.eps0, args.seed)?,
            &b,
            args.eps,
            args.max_iter,
        )?,
        MethodArg::Nnls => nonneg_regression(&a, &b, args.eps, args.seed)?,
        MethodArg::Lp => {
            let mut params =
                LpParams::new(a.n_rows(), a.n_cols() + 1, args.p, args.eps, args.seed)?;
            params.t_sample = args.sample_size;
            let (sol, cs) = lp_regress_with_coreset(&a, &b, &params)?;
            coreset = Some(cs);
            sol
        }
    };
    let solve_ms = ms_since(t1);

    write_dense_matrix_market(args.out.join("solution.mtx"), &sol.x)?;
    if let Some(cs) = &coreset {
        write_coreset_csv(&args.out.join("coreset.csv"), cs)?;
    }
    write_json(
        &args.out.join("telemetry.json"),
        &RegressTelemetry {
            schema: SCHEMA_VERSION,
            n: a.n_rows(),
            d: a.n_cols(),
            nnz: a.nnz(),
            rhs: b.ncols(),
            eps: args.eps,
            p: (args.method == MethodArg::Lp).then_some(args.p),
            solution: &sol,
            timings: Timings { load_ms, solve_ms },
        },
    )
}

fn exact_solution(a: &SparseMatrix, b: &DenseMatrix, seed: u64) -> Result<RegressionSolution> {
    let x = exact_least_squares(a, b, &Tolerances::default())?;
    Ok(RegressionSolution {
        residual_norm: residual_norm(a, &x, b)?,
        x,
        method: Method::Exact,
        sketch_dim: a.n_rows(),
        seed,
        iterations: 0,
        residual_history: Vec::new(),
    })
}

/// Contents of `manifest.json`.
#[derive(Debug, Serialize)]
struct LowRankManifest {
    schema: &'static str,
    k: usize,
    eps: f64,
    seed: u64,
    strategy: Strategy,
    err: f64,
    t_r: usize,
    t_s: usize,
    cond_su: f64,
    capped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    files: [&'static str; 3],
    wall_ms: f64,
}

fn cmd_lowrank(args: &LowRankArgs) -> Result<()> {
    let a = load_matrix_market(&args.input)?;
    let strategy = match args.strategy {
        StrategyArg::SrhtCompose => Strategy::SrhtCompose,
        StrategyArg::LeverageSample => Strategy::LeverageSample,
    };
    let t0 = Instant::now();
    let out = low_rank_with(
        &a,
        &LowRankConfig::new(args.k, args.eps).with_strategy(strategy),
        args.seed,
    )?;
    let wall_ms = ms_since(t0);
    let delta_k = if args.oracle {
        Some(best_rank_k(&a, args.k)?.1)
    } else {
        None
    };
    let ratio = delta_k.map(|dk| 1.0 + excess_error(out.err, dk, a.frobenius_norm()));

    fs::create_dir_all(&args.out)?;
    let f = &out.factors;
    write_dense_matrix_market(args.out.join("L.mtx"), &f.l)?;
    write_dense_matrix_market(
        args.out.join("D.mtx"),
        &DenseMatrix::from_column_slice(f.d.len(), 1, &f.d),
    )?;
    write_dense_matrix_market(args.out.join("W.mtx"), &f.w)?;
    write_json(
        &args.out.join("manifest.json"),
        &LowRankManifest {
            schema: SCHEMA_VERSION,
            k: args.k,
            eps: args.eps,
            seed: args.seed,
            strategy,
            err: out.err,
            t_r: out.t_r,
            t_s: out.t_s,
            cond_su: out.cond_su,
            capped: out.capped,
            delta_k,
            ratio,
            files: ["L.mtx", "D.mtx", "W.mtx"],
            wall_ms,
        },
    )
}

fn cmd_leverage(args: &LeverageArgs) -> Result<()> {
    let a = load_matrix_market(&args.input)?;
    let est = approx_leverage_scores(&a, args.eps, args.repetitions, args.seed)?;
    let exact = if args.oracle {
        Some(exact_leverage_scores(&a, &Tolerances::default())?)
    } else {
        None
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(&args.out)?;
    match &exact {
        Some(_) => w.write_record(["index", "score", "exact"])?,
        None => w.write_record(["index", "score"])?,
    }
    for (i, s) in est.scores.iter().enumerate() {
        let mut rec = vec![i.to_string(), format!("{s:?}")];
        if let Some(ex) = &exact {
            rec.push(format!("{:?}", ex[i]));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `<stem>.pareto.csv` beside the record CSV.
pub fn pareto_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "bench".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.pareto.csv"))
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let paths = corpus_files(&args.corpus)?;
    if paths.is_empty() {
        return Err(Error::param(format!(
            "no .mtx files in {}",
            args.corpus.display()
        )));
    }
    let cfg = BenchConfig {
        k: args.k,
        trials: args.trials,
        seed: args.seed,
        jobs: args.jobs,
        cond_target: args.cond_target,
        include_below_k: args.include_below_k,
        ..BenchConfig::default()
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let summary = run_bench(&paths, &cfg, fs::File::create(&args.out)?)?;
    write_pareto_csv(pareto_path(&args.out), &pareto_summary(&summary.records))?;
    log::info!(
        "bench: {} matrices, {} records, {} skipped",
        summary.processed,
        summary.records.len(),
        summary.skipped.len()
    );
    Ok(())
}

fn cmd_gen_corpus(args: &GenCorpusArgs) -> Result<()> {
    let spec = CorpusSpec {
        count: args.count,
        n_range: (args.n_min, args.n_max),
        d_range: (args.d_min, args.d_max),
        k: args.k,
        seed: args.seed,
    };
    if args.k == 0 || args.k > args.d_min {
        return Err(Error::param(format!(
            "k must lie in [1, d_min], got {}",
            args.k
        )));
    }
    write_corpus(&args.out, &spec)?;
    Ok(())
}
