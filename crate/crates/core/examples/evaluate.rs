//! Exploitability estimate of a trained store against the fixed agents,
//! in argmax and sampling modes and with several workers.
//!
//! `cargo run --release --example evaluate`

use cfrp::abstraction::DecisionSchedule;
use cfrp::cfr::{cfr_iteration, derive_seed, NodeStore};
use cfrp::eval::{evaluate, EvalMode, EvalOptions};
use cfrp::persistence::Benchmark;
use cfrp::tiles::shuffle_deal;

fn main() -> cfrp::Result<()> {
    let mut store = NodeStore::new();
    for t in 0..300 {
        cfr_iteration(&shuffle_deal(derive_seed(5, t)), &mut store, &DecisionSchedule::default())?;
    }
    let bench = Benchmark::generate(100, 11).deals;
    for (mode, workers) in [(EvalMode::Argmax, 1), (EvalMode::Argmax, 4), (EvalMode::Sample(3), 2)] {
        let opts = EvalOptions {
            mode,
            workers,
            ..EvalOptions::default()
        };
        println!("mode {mode}, {workers} workers\n{}", evaluate(&store, &bench, &opts)?);
    }
    let empty = NodeStore::new();
    println!("empty store (plays Normal everywhere)\n{}", evaluate(&empty, &bench, &EvalOptions::default())?);
    Ok(())
}
