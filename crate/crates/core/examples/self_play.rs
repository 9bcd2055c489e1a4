//! Fixed-pattern agents playing every pairing on a few deals.
//!
//! `cargo run --example self_play [DEALS]`

use cfrp::engine::play_deal;
use cfrp::policy::{fixed_pattern_agent, AbstractAction};
use cfrp::tiles::shuffle_deal;

fn main() -> cfrp::Result<()> {
    let deals: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    println!("mean utility of the row agent (seat 0) over {deals} deals");
    print!("{:>10}", "");
    for b in AbstractAction::ALL {
        print!("{b:>10}");
    }
    println!();
    for a in AbstractAction::ALL {
        print!("{a:>10}");
        for b in AbstractAction::ALL {
            let mut total = 0;
            for seed in 0..deals {
                let (u, _) = play_deal(&shuffle_deal(seed), &mut fixed_pattern_agent(a), &mut fixed_pattern_agent(b))?;
                total += u[0];
            }
            print!("{:>10.3}", total as f64 / deals as f64);
        }
        println!();
    }
    Ok(())
}
