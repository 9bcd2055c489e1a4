//! Regret matching on small normal-form games.
//!
//! `cargo run --example regret_matching`

use cfrp::cfr::{regret_match, rm_normal_form, MatrixGame};

fn main() -> cfrp::Result<()> {
    println!("single step: regrets [-0.598, 2.128, -1.356] -> {:?}", regret_match(&[-0.598, 2.128, -1.356], &[true; 3])?.0);
    println!("masked:      regrets [1, 2, 3], QiDui illegal -> {:?}", regret_match(&[1.0, 2.0, 3.0], &[true, true, false])?.0);

    let games = [
        ("rock-paper-scissors", MatrixGame::rock_paper_scissors()),
        ("matching pennies", MatrixGame::matching_pennies()),
        ("asymmetric 2x3", MatrixGame::zero_sum(vec![vec![3.0, -1.0, 0.5], vec![-2.0, 1.0, 0.0]])?),
    ];
    for (name, game) in games {
        for iterations in [100, 10_000] {
            let s = rm_normal_form(&game, iterations)?;
            println!(
                "{name:<20} {iterations:>6} iterations  row {:.3?}  col {:.3?}  exploitability {:.5}",
                s[0],
                s[1],
                game.exploitability(&s)
            );
        }
    }
    Ok(())
}
