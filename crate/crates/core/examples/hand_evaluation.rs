//! Win checking, shanten and acceptance counts for each pattern.
//!
//! `cargo run --example hand_evaluation`

use cfrp::patterns::{acceptance_count, evaluate_win, shanten, Meld};
use cfrp::policy::{best_discard, AbstractAction};
use cfrp::tiles::{Hand, TileKind};

fn hand(indices: &[u8]) -> Hand {
    let tiles: Vec<TileKind> = indices.iter().map(|&i| TileKind::new(i).unwrap()).collect();
    Hand::from_tiles(&tiles).unwrap()
}

fn main() -> cfrp::Result<()> {
    let complete = [
        ("chows and a pong", hand(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 13, 13])),
        ("four pongs", hand(&[0, 0, 0, 4, 4, 4, 9, 9, 9, 13, 13, 13, 15, 15])),
        ("seven pairs", hand(&[0, 0, 2, 2, 4, 4, 6, 6, 9, 9, 11, 11, 14, 14])),
        ("nothing", hand(&[0, 2, 4, 6, 8, 9, 10, 11, 12, 13, 14, 15, 1, 3])),
    ];
    for (name, h) in &complete {
        let w = evaluate_win(h, &[])?;
        println!("{name:<17} {h}  -> {:?} ({} points)", w.pattern, w.points);
    }

    let melded = [Meld::pong(TileKind::new(13)?)];
    let h = hand(&[0, 0, 0, 4, 4, 4, 9, 9, 9, 15, 15]);
    println!("with melds {}: {h} -> {:?}", melded[0], evaluate_win(&h, &melded)?.pattern);

    let partial = hand(&[0, 0, 1, 4, 4, 7, 9, 9, 11, 13, 13, 14, 15]);
    println!("\n13 tiles {partial}");
    for a in AbstractAction::ALL {
        println!(
            "  {a:<9} shanten {:>2}  acceptance {:>2}  best discard after drawing C2: {}",
            shanten(&partial, &[], a),
            acceptance_count(&partial, &[], a),
            best_discard(&partial.with(TileKind::character(2)), &[], a)
        );
    }
    Ok(())
}
