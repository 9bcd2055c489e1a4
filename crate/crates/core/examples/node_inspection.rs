//! Feature extraction and key encoding along one game, then a look at the
//! stored nodes after a short run.
//!
//! `cargo run --example node_inspection`

use cfrp::abstraction::{decode, encode, extract_features, info_set_key, is_decision_point, legal_abstract_actions, Features};
use cfrp::cfr::{average_strategy, cfr_iteration, NodeStore};
use cfrp::engine::new_game;
use cfrp::policy::{choose_action, AbstractAction};
use cfrp::tiles::shuffle_deal;

fn main() -> cfrp::Result<()> {
    let f = Features::new(1, 3, 2, 3, 11);
    let key = encode(&f)?;
    println!("{f} -> key {key} (bits {:020b}) -> {}", key.value(), decode(key));

    let mut s = new_game(&shuffle_deal(61))?;
    while !s.is_terminal() {
        let p = s.to_act;
        if is_decision_point(&s, p) {
            println!(
                "turn {:>2} player {p}: {}  key {}  legal {:?}",
                s.turns[p as usize],
                extract_features(&s, p),
                info_set_key(&s, p),
                legal_abstract_actions(&s, p)
            );
        }
        let a = choose_action(&s, p, AbstractAction::Normal)?;
        s.apply_mut(a)?;
    }

    let mut store = NodeStore::new();
    for seed in 0..200 {
        cfr_iteration(&shuffle_deal(seed), &mut store, &Default::default())?;
    }
    let mut nodes: Vec<_> = store.iter().collect();
    nodes.sort_by_key(|n| std::cmp::Reverse(n.visits));
    println!("\n{} nodes after 200 iterations; most visited:", store.len());
    for n in nodes.iter().take(8) {
        println!("  {} {}  visits {:>4}  average {:.3?}", n.key, decode(n.key), n.visits, average_strategy(n).0);
    }
    Ok(())
}
