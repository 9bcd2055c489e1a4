//! Benchmark files: generation, text form and re-derived deal seeds.
//!
//! `cargo run --example benchmark`

use std::path::Path;

use cfrp::cfr::derive_seed;
use cfrp::persistence::{format_benchmark, parse_benchmark, Benchmark};
use cfrp::tiles::shuffle_deal;

fn main() -> cfrp::Result<()> {
    let b = Benchmark::generate(3, 42);
    let text = format_benchmark(&b);
    print!("{text}");
    let back = parse_benchmark(&text, Path::new("inline"))?;
    for (i, d) in back.deals.iter().enumerate() {
        let seed = derive_seed(42, i as u64);
        println!("deal {i}: seed {seed}, matches shuffle_deal(seed): {}", *d == shuffle_deal(seed));
    }
    Ok(())
}
