//! Size of the deal space and of the full and abstract game trees.
//!
//! `cargo run --example complexity`

use cfrp::tiles::complexity_bounds;

fn main() {
    let b = complexity_bounds();
    for (name, n) in [
        ("distinct deals 64!/(4!)^16", &b.deal_count),
        ("tree leaves lower bound 14^38", &b.tree_leaves_lb),
        ("abstract leaves 3^38", &b.abstract_leaves),
    ] {
        let digits = n.to_string();
        println!("{name:<32} {}.{}e{}  ({digits})", &digits[..1], &digits[1..4], digits.len() - 1);
    }
}
