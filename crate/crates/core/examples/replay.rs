//! Plays one game, writes its log, reads it back and renders it.
//!
//! `cargo run --example replay [SEED]`

use cfrp::cli::render_log;
use cfrp::engine::play_deal;
use cfrp::persistence::{format_log, read_log, write_log};
use cfrp::policy::{fixed_pattern_agent, AbstractAction};
use cfrp::tiles::shuffle_deal;

fn main() -> cfrp::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(36);
    let (u, log) = play_deal(
        &shuffle_deal(seed),
        &mut fixed_pattern_agent(AbstractAction::PongPongHu),
        &mut fixed_pattern_agent(AbstractAction::Normal),
    )?;
    let dir = tempfile::tempdir().map_err(|e| cfrp::Error::Config(e.to_string()))?;
    let path = dir.path().join("game.log");
    write_log(&log, &path)?;
    let back = read_log(&path)?;
    assert_eq!(format_log(&back), format_log(&log));
    println!("{} log lines, utilities {u:?}\n", log.events.len());
    print!("{}", render_log(&back)?);
    Ok(())
}
