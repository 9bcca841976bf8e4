//! The low-rank benchmark protocol.
//!
//! For every matrix in a corpus, `t_R` sweeps the grid `⌊1.6^z − 0.5⌋`
//! (`z >= 1`, `t_R <= d/5`). Each point runs the leverage-sampling low-rank
//! pipeline, which grows `t_S` until `cond(SU)` reaches the target, and
//! records the excess error `err/Δ_k − 1` against the exact truncated SVD.
//! Matrices run concurrently; their records go through one sink thread that
//! writes them in corpus order, so the CSV is identical for any `jobs`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::load_matrix_market;
use crate::linalg::best_rank_k;
use crate::lowrank::{low_rank_with, LowRankConfig, Strategy};
use crate::matrix::SparseMatrix;
use crate::rng::derive_seed;

/// Value of the `schema` column; bump on any column change.
pub const SCHEMA_VERSION: &str = "v1";

/// Below `DELTA_FLOOR * ‖A‖_F` the input counts as exactly rank k and the
/// excess error is reported relative to `‖A‖_F` instead of `Δ_k`.
const DELTA_FLOOR: f64 = 1e-12;

/// `err / Δ_k − 1`, or `err / ‖A‖_F` when `Δ_k` is at roundoff level.
pub fn excess_error(err: f64, delta_k: f64, frobenius: f64) -> f64 {
    if delta_k <= DELTA_FLOOR * frobenius {
        err / frobenius.max(f64::MIN_POSITIVE)
    } else {
        err / delta_k - 1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub schema: String,
    pub matrix_id: String,
    pub n: usize,
    pub d: usize,
    pub nnz: usize,
    pub k: usize,
    pub t_r: usize,
    pub t_s: usize,
    pub trial: usize,
    /// `err/Δ_k − 1`, or `err/‖A‖_F` when `Δ_k` vanishes.
    pub err_ratio_minus_1: f64,
    pub cond_su: f64,
    pub capped: bool,
    pub seed: u64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchConfig {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Matrices processed concurrently.
    pub jobs: usize,
    pub cond_target: f64,
    pub t_s_cap_ratio: usize,
    /// Also run grid points with `t_R < k`.
    pub include_below_k: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            k: 5,
            trials: 3,
            seed: 0,
            jobs: 1,
            cond_target: 1.2,
            t_s_cap_ratio: 110,
            include_below_k: false,
        }
    }
}

/// `⌊1.6^z − 0.5⌋` for `z = 1, 2, ...` while the value is at most `d/5`,
/// deduplicated and, unless `include_below_k`, restricted to `t_R >= k`.
pub fn tr_grid(d: usize, k: usize, include_below_k: bool) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for z in 1.. {
        let t = (1.6f64.powi(z) - 0.5).floor() as usize;
        if 5 * t > d {
            break;
        }
        if (include_below_k || t >= k) && out.last() != Some(&t) {
            out.push(t);
        }
    }
    out
}

/// Stable 64-bit FNV-1a, so a matrix's seeds depend only on its id.
fn id_hash(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// All grid points and trials for one matrix.
pub fn bench_matrix(id: &str, a: &SparseMatrix, cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let (_, delta) = best_rank_k(a, cfg.k)?;
    let fro = a.frobenius_norm();
    let mseed = derive_seed(cfg.seed, id_hash(id));
    let mut out = Vec::new();
    for t_r in tr_grid(a.n_cols(), cfg.k, cfg.include_below_k) {
        for trial in 0..cfg.trials {
            let seed = derive_seed(derive_seed(mseed, t_r as u64), trial as u64);
            let mut lc = LowRankConfig::new(cfg.k, 0.5)
                .with_strategy(Strategy::LeverageSample)
                .with_t_r(t_r);
            lc.cond_target = cfg.cond_target;
            lc.t_s_cap_ratio = cfg.t_s_cap_ratio;
            let start = Instant::now();
            let res = low_rank_with(a, &lc, seed)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let err_ratio_minus_1 = excess_error(res.err, delta, fro);
            out.push(BenchRecord {
                schema: SCHEMA_VERSION.to_string(),
                matrix_id: id.to_string(),
                n: a.n_rows(),
                d: a.n_cols(),
                nnz: a.nnz(),
                k: cfg.k,
                t_r,
                t_s: res.t_s,
                trial,
                err_ratio_minus_1,
                cond_su: res.cond_su,
                capped: res.capped,
                seed,
                wall_ms,
            });
        }
    }
    Ok(out)
}

/// `.mtx` files directly inside `dir`, sorted by name.
pub fn corpus_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mtx"))
        .collect();
    paths.sort();
    Ok(paths)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchSummary {
    pub processed: usize,
    pub skipped: Vec<PathBuf>,
    pub records: Vec<BenchRecord>,
}

/// Runs the protocol over `paths` and streams CSV rows into `sink`.
/// Unreadable or too-small matrices are skipped with a warning; it is an
/// error if none is processed.
pub fn run_bench<W: Write + Send>(
    paths: &[PathBuf],
    cfg: &BenchConfig,
    sink: W,
) -> Result<BenchSummary> {
    if cfg.k == 0 || cfg.trials == 0 || cfg.jobs == 0 {
        return Err(Error::param("bench needs k, trials and jobs >= 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))?;
    let (tx, rx) = mpsc::channel::<(usize, Option<Vec<BenchRecord>>)>();

    std::thread::scope(|scope| {
        let writer = scope.spawn(move || write_in_order(rx, paths.len(), sink));
        pool.install(|| {
            paths
                .par_iter()
                .enumerate()
                .for_each_with(tx, |tx, (i, path)| {
                    let recs = match load_and_bench(path, cfg) {
                        Ok(r) => Some(r),
                        Err(e) => {
                            log::warn!("skipping {}: {e}", path.display());
                            None
                        }
                    };
                    // the receiver lives until every sender is dropped
                    tx.send((i, recs)).expect("bench sink hung up");
                });
        });
        let (records, done) = writer.join().expect("bench sink panicked")?;
        let skipped = paths
            .iter()
            .zip(&done)
            .filter(|(_, ok)| !**ok)
            .map(|(p, _)| p.clone())
            .collect::<Vec<_>>();
        let processed = paths.len() - skipped.len();
        if processed == 0 {
            return Err(Error::Degenerate(
                "no matrix in the corpus could be processed".into(),
            ));
        }
        Ok(BenchSummary {
            processed,
            skipped,
            records,
        })
    })
}

fn load_and_bench(path: &Path, cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let a = load_matrix_market(path)?;
    if a.n_rows().min(a.n_cols()) < cfg.k {
        return Err(Error::param(format!(
            "{}x{} is smaller than k = {}",
            a.n_rows(),
            a.n_cols(),
            cfg.k
        )));
    }
    let id = path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    bench_matrix(&id, &a, cfg)
}

/// The serialized sink: holds results that arrive early and writes each
/// matrix once all matrices before it are written.
fn write_in_order<W: Write>(
    rx: mpsc::Receiver<(usize, Option<Vec<BenchRecord>>)>,
    total: usize,
    sink: W,
) -> Result<(Vec<BenchRecord>, Vec<bool>)> {
    let mut w = csv::Writer::from_writer(sink);
    let mut pending = BTreeMap::new();
    let mut next = 0;
    let mut all = Vec::new();
    let mut done = vec![false; total];
    for (i, recs) in rx {
        pending.insert(i, recs);
        while let Some(recs) = pending.remove(&next) {
            if let Some(recs) = recs {
                for r in &recs {
                    w.serialize(r)?;
                }
                w.flush()?;
                all.extend(recs);
                done[next] = true;
            }
            next += 1;
        }
    }
    Ok((all, done))
}

/// 1%-Pareto envelope of points where larger `x` and smaller `y` are both
/// better: for each distinct `x`, the smallest `y` such that at most
/// `frac * len` points have `x' >= x` and `y' < y`. Non-decreasing in `x`.
pub fn pareto_curve(points: &[(f64, f64)], frac: f64) -> Vec<(f64, f64)> {
    let allowed = (frac * points.len() as f64).floor() as usize;
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    // once at most `allowed` points remain every y qualifies, so the
    // running maximum keeps the curve monotone without breaking the bound
    xs.into_iter()
        .scan(f64::NEG_INFINITY, |floor, x| {
            let mut ys: Vec<f64> = points.iter().filter(|p| p.0 >= x).map(|p| p.1).collect();
            ys.sort_by(f64::total_cmp);
            *floor = ys[allowed.min(ys.len() - 1)].max(*floor);
            Some((x, *floor))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParetoRow {
    /// `error` for `(k/t_R, err_ratio_minus_1)`, `conditioning` for
    /// `(t_R/t_S, cond_su − 1)`.
    pub curve: &'static str,
    pub x: f64,
    pub y: f64,
}

/// Both 1%-Pareto curves of a benchmark run.
pub fn pareto_summary(records: &[BenchRecord]) -> Vec<ParetoRow> {
    let err: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.k as f64 / r.t_r as f64, r.err_ratio_minus_1))
        .collect();
    let cond: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.t_r as f64 / r.t_s as f64, r.cond_su - 1.0))
        .collect();
    let rows = |curve, pts: &[(f64, f64)]| {
        pareto_curve(pts, 0.01)
            .into_iter()
            .map(move |(x, y)| ParetoRow { curve, x, y })
            .collect::<Vec<_>>()
    };
    let mut out = rows("error", &err);
    out.extend(rows("conditioning", &cond));
    out
}

pub fn write_pareto_csv(path: impl AsRef<Path>, rows: &[ParetoRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
