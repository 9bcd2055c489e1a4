//! CFR on a single deal, compared with the uniform profile.
//!
//! `cargo run --example cfr_iteration [SEED]`

use cfrp::abstraction::{decode, DecisionSchedule};
use cfrp::cfr::{average_strategy, cfr_iteration, NodeStore};
use cfrp::tiles::shuffle_deal;

fn main() -> cfrp::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(61);
    let deal = shuffle_deal(seed);
    let schedule = DecisionSchedule::default();
    let mut store = NodeStore::new();
    for t in 1..=2000 {
        let v = cfr_iteration(&deal, &mut store, &schedule)?;
        if t == 1 || t % 500 == 0 {
            println!("iteration {t:>5}: current-profile value for seat 0 {:+.4}", v[0]);
        }
    }
    println!("\n{} information sets", store.len());
    for node in store.iter() {
        println!("{} {}  visits {:>5}  average {:.3?}", node.key, decode(node.key), node.visits, average_strategy(node).0);
    }
    Ok(())
}
