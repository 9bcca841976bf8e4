//! Writes a small synthetic corpus, runs the low-rank benchmark over it and
//! prints the 1%-Pareto curves that the `bench` subcommand writes to CSV.
//!
//! ```text
//! cargo run --release --example bench_corpus
//! ```

use sketchnla::bench::{corpus_files, pareto_summary, run_bench, BenchConfig};
use sketchnla::synth::{write_corpus, CorpusSpec};

fn main() -> sketchnla::Result<()> {
    let dir = std::env::temp_dir().join("sketchnla-bench-example");
    std::fs::create_dir_all(&dir)?;
    let spec = CorpusSpec {
        count: 6,
        ..CorpusSpec::default()
    };
    write_corpus(&dir, &spec)?;
    let cfg = BenchConfig {
        trials: 2,
        jobs: 2,
        ..BenchConfig::default()
    };
    let summary = run_bench(&corpus_files(&dir)?, &cfg, std::io::sink())?;
    println!(
        "{} matrices, {} records",
        summary.processed,
        summary.records.len()
    );
    for row in pareto_summary(&summary.records) {
        println!("  {:<12} x {:>8.3}  y {:.4}", row.curve, row.x, row.y);
    }
    Ok(())
}
