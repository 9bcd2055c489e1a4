//! Epoch-based training with a per-epoch benchmark score.
//!
//! `cargo run --release --example train [ITERATIONS]`

use cfrp::cfr::{train, NodeStore, TrainConfig};
use cfrp::persistence::Benchmark;

fn main() -> cfrp::Result<()> {
    let iterations: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let dir = tempfile::tempdir().map_err(|e| cfrp::Error::Config(e.to_string()))?;
    let config = TrainConfig {
        benchmark: Benchmark::generate(50, 7).deals,
        store_path: Some(dir.path().join("store.txt")),
        report_path: Some(dir.path().join("report.csv")),
        ..TrainConfig::new(iterations, (iterations / 5).max(1), 1)
    };
    let mut store = NodeStore::new();
    for r in train(&config, &mut store)? {
        println!(
            "epoch {:>2}  iterations {:>6}  nodes {:>6}  exploitability {:.4}",
            r.epoch,
            r.iterations_total,
            r.nodes,
            r.exploitability.unwrap_or(f64::NAN)
        );
    }
    print!("\n{}", std::fs::read_to_string(dir.path().join("report.csv")).unwrap_or_default());
    Ok(())
}
