//! Line-oriented text formats for node stores, game logs, benchmarks and
//! training reports. Reals use the shortest decimal that parses back to the
//! same bits, so every format round-trips exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::abstraction::InfoSetKey;
use crate::cfr::{derive_seed, CfrNode, EpochReport, NodeStore};
use crate::engine::{DrawEnd, Event, GameLog, Outcome, Phase};
use crate::error::{Error, Result};
use crate::patterns::WinPattern;
use crate::policy::AbstractAction;
use crate::tiles::{shuffle_deal, Deal, TileKind, HAND_SIZE};

pub const STORE_HEADER: &str = "cfrp-store v1 actions=normal,pongpong,qidui";
pub const REPORT_HEADER: &str = "epoch,iterations_total,nodes,exploitability";
const BENCH_MAGIC: &str = "cfrp-bench v1";

/// Writes `contents` to a sibling temp file and renames it over `path`.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn mask_bits(mask: &[bool; 3]) -> String {
    mask.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn format_store(store: &NodeStore) -> String {
    let mut out = String::with_capacity(64 * (store.len() + 1));
    out.push_str(STORE_HEADER);
    out.push('\n');
    for n in store.iter() {
        let [r0, r1, r2] = n.regret_sum;
        let [s0, s1, s2] = n.strategy_sum;
        out.push_str(&format!(
            "{},{},{},{r0},{r1},{r2},{s0},{s1},{s2}\n",
            n.key,
            mask_bits(&n.legal_mask),
            n.visits
        ));
    }
    out
}

/// Parses store text; `path` only labels diagnostics.
pub fn parse_store(text: &str, path: &Path) -> Result<NodeStore> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == STORE_HEADER => {}
        Some((_, h)) => {
            return Err(Error::format(path, 1, format!("expected header `{STORE_HEADER}`, found `{h}`")));
        }
        None => return Err(Error::format(path, 1, "missing header")),
    }
    let mut store = NodeStore::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let bad = |msg: String| Error::format(path, lineno, msg);
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(bad(format!("expected 9 fields, found {}", fields.len())));
        }
        let key: InfoSetKey = fields[0].parse().map_err(|e: Error| bad(e.to_string()))?;
        let mut mask = [false; 3];
        let bits = fields[1].as_bytes();
        if bits.len() != 3 {
            return Err(bad(format!("bad legal mask `{}`", fields[1])));
        }
        for (m, b) in mask.iter_mut().zip(bits) {
            *m = match b {
                b'1' => true,
                b'0' => false,
                _ => return Err(bad(format!("bad legal mask `{}`", fields[1]))),
            };
        }
        let visits: u64 = fields[2]
            .parse()
            .map_err(|_| bad(format!("bad visit count `{}`", fields[2])))?;
        let mut reals = [0.0f64; 6];
        for (r, f) in reals.iter_mut().zip(&fields[3..]) {
            *r = f
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| bad(format!("bad number `{f}`")))?;
        }
        let node = CfrNode {
            key,
            legal_mask: mask,
            regret_sum: [reals[0], reals[1], reals[2]],
            strategy_sum: [reals[3], reals[4], reals[5]],
            visits,
        };
        for i in 0..3 {
            if !mask[i] && (node.regret_sum[i] != 0.0 || node.strategy_sum[i] != 0.0) {
                return Err(bad(format!("nonzero entry for illegal action {i} at key {key}")));
            }
        }
        if store.get(key).is_some() {
            return Err(bad(format!("duplicate key {key}")));
        }
        store.insert(node)?;
    }
    Ok(store)
}

pub fn save_store(store: &NodeStore, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &format_store(store))
}

pub fn load_store(path: impl AsRef<Path>) -> Result<NodeStore> {
    let path = path.as_ref();
    parse_store(&read_text(path)?, path)
}

fn end_name(end: DrawEnd) -> &'static str {
    match end {
        DrawEnd::Front => "front",
        DrawEnd::Back => "back",
    }
}

fn kinds_line(tiles: &[TileKind]) -> String {
    tiles
        .iter()
        .map(|k| k.index().to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn format_event(e: &Event) -> String {
    match e {
        Event::Seed(s) => format!("SEED {s}"),
        Event::Hand { player, tiles } => format!("HAND {player} {}", kinds_line(tiles)),
        Event::Draw { player, tile, end } => format!("DRAW {player} {} {}", tile.index(), end_name(*end)),
        Event::Discard { player, tile } => format!("DISCARD {player} {}", tile.index()),
        Event::Chow { player, base } => format!("CHOW {player} {}", base.index()),
        Event::Pong { player, tile } => format!("PONG {player} {}", tile.index()),
        Event::Kong { player, tile, concealed } => format!(
            "KONG {player} {} {}",
            tile.index(),
            if *concealed { "concealed" } else { "exposed" }
        ),
        Event::Pass { player, phase } => format!("PASS {player} {}", phase.index()),
        Event::Policy { player, round, pattern } => format!("POLICY {player} {round} {}", pattern.name()),
        Event::End(o) => match o.winner {
            Some(w) => format!("END win {w} {} {}", o.pattern.name(), o.points),
            None => "END drawn".to_string(),
        },
    }
}

pub fn format_log(log: &GameLog) -> String {
    let mut out = String::new();
    for e in &log.events {
        out.push_str(&format_event(e));
        out.push('\n');
    }
    out
}

/// Parses one log line; errors carry only the message.
pub fn parse_event(line: &str) -> std::result::Result<Event, String> {
    let f: Vec<&str> = line.split(' ').collect();
    let arity = |n: usize| {
        if f.len() == n {
            Ok(())
        } else {
            Err(format!("{} takes {} fields, found {}", f[0], n - 1, f.len() - 1))
        }
    };
    let player = |s: &str| match s {
        "0" => Ok(0u8),
        "1" => Ok(1u8),
        _ => Err(format!("bad player `{s}`")),
    };
    let kind = |s: &str| {
        s.parse::<u8>()
            .ok()
            .and_then(|v| TileKind::new(v).ok())
            .ok_or_else(|| format!("bad tile kind `{s}`"))
    };
    Ok(match f[0] {
        "SEED" => {
            arity(2)?;
            Event::Seed(f[1].parse().map_err(|_| format!("bad seed `{}`", f[1]))?)
        }
        "HAND" => {
            arity(2 + HAND_SIZE)?;
            Event::Hand {
                player: player(f[1])?,
                tiles: f[2..].iter().map(|s| kind(s)).collect::<std::result::Result<_, _>>()?,
            }
        }
        "DRAW" => {
            arity(4)?;
            let end = match f[3] {
                "front" => DrawEnd::Front,
                "back" => DrawEnd::Back,
                other => return Err(format!("bad draw end `{other}`")),
            };
            Event::Draw {
                player: player(f[1])?,
                tile: kind(f[2])?,
                end,
            }
        }
        "DISCARD" => {
            arity(3)?;
            Event::Discard {
                player: player(f[1])?,
                tile: kind(f[2])?,
            }
        }
        "CHOW" => {
            arity(3)?;
            let base = kind(f[2])?;
            if !base.is_character() || base.index() > 6 {
                return Err(format!("bad chow base `{}`", f[2]));
            }
            Event::Chow {
                player: player(f[1])?,
                base,
            }
        }
        "PONG" => {
            arity(3)?;
            Event::Pong {
                player: player(f[1])?,
                tile: kind(f[2])?,
            }
        }
        "KONG" => {
            arity(4)?;
            let concealed = match f[3] {
                "concealed" => true,
                "exposed" => false,
                other => return Err(format!("bad kong type `{other}`")),
            };
            Event::Kong {
                player: player(f[1])?,
                tile: kind(f[2])?,
                concealed,
            }
        }
        "PASS" => {
            arity(3)?;
            let phase = f[2]
                .parse::<u8>()
                .ok()
                .and_then(Phase::from_index)
                .ok_or_else(|| format!("bad phase `{}`", f[2]))?;
            Event::Pass {
                player: player(f[1])?,
                phase,
            }
        }
        "POLICY" => {
            arity(4)?;
            let round = f[2]
                .parse::<u8>()
                .ok()
                .filter(|&r| r <= 38)
                .ok_or_else(|| format!("bad round `{}`", f[2]))?;
            Event::Policy {
                player: player(f[1])?,
                round,
                pattern: AbstractAction::from_name(f[3]).ok_or_else(|| format!("bad pattern `{}`", f[3]))?,
            }
        }
        "END" if f.get(1) == Some(&"drawn") => {
            arity(2)?;
            Event::End(Outcome::drawn())
        }
        "END" => {
            arity(5)?;
            if f[1] != "win" {
                return Err(format!("bad END kind `{}`", f[1]));
            }
            let pattern = WinPattern::from_name(f[3])
                .filter(|p| *p != WinPattern::None)
                .ok_or_else(|| format!("bad pattern `{}`", f[3]))?;
            let points: i32 = f[4].parse().map_err(|_| format!("bad points `{}`", f[4]))?;
            if points != pattern.points() {
                return Err(format!("{} scores {}, not {points}", pattern.name(), pattern.points()));
            }
            Event::End(Outcome {
                winner: Some(player(f[2])?),
                pattern,
                points,
            })
        }
        other => return Err(format!("unknown event `{other}`")),
    })
}

pub fn parse_log(text: &str, path: &Path) -> Result<GameLog> {
    let events = text
        .lines()
        .enumerate()
        .map(|(i, line)| parse_event(line).map_err(|m| Error::format(path, i + 1, m)))
        .collect::<Result<_>>()?;
    Ok(GameLog { events })
}

pub fn write_log(log: &GameLog, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &format_log(log))
}

pub fn read_log(path: impl AsRef<Path>) -> Result<GameLog> {
    let path = path.as_ref();
    parse_log(&read_text(path)?, path)
}

/// A benchmark: `deals[i]` is `shuffle_deal(derive_seed(seed, i))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Benchmark {
    pub seed: u64,
    pub deals: Vec<Deal>,
}

impl Benchmark {
    pub fn generate(count: usize, seed: u64) -> Self {
        Benchmark {
            seed,
            deals: (0..count as u64).map(|i| shuffle_deal(derive_seed(seed, i))).collect(),
        }
    }
}

pub fn format_benchmark(b: &Benchmark) -> String {
    let mut out = format!("{BENCH_MAGIC} deals={} seed={}\n", b.deals.len(), b.seed);
    for d in &b.deals {
        out.push_str(&d.to_line());
        out.push('\n');
    }
    out
}

/// Parses benchmark text. Deal seeds are re-derived from the header seed
/// and the line position.
pub fn parse_benchmark(text: &str, path: &Path) -> Result<Benchmark> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::format(path, 1, "missing header"))?;
    let parsed = header.strip_prefix(BENCH_MAGIC).and_then(|rest| {
        let mut it = rest.split(' ').filter(|s| !s.is_empty());
        let n = it.next()?.strip_prefix("deals=")?.parse::<usize>().ok()?;
        let s = it.next()?.strip_prefix("seed=")?.parse::<u64>().ok()?;
        it.next().is_none().then_some((n, s))
    });
    let (count, seed) = parsed.ok_or_else(|| {
        Error::format(path, 1, format!("expected `{BENCH_MAGIC} deals=N seed=S`, found `{header}`"))
    })?;
    let mut deals = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let deal = Deal::parse_line(derive_seed(seed, i as u64), line)
            .map_err(|e| Error::format(path, i + 2, e.to_string()))?;
        deals.push(deal);
    }
    if deals.len() != count {
        return Err(Error::format(
            path,
            deals.len() + 2,
            format!("header promises {count} deals, found {}", deals.len()),
        ));
    }
    Ok(Benchmark { seed, deals })
}

pub fn write_benchmark(b: &Benchmark, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &format_benchmark(b))
}

pub fn read_benchmark(path: impl AsRef<Path>) -> Result<Benchmark> {
    let path = path.as_ref();
    parse_benchmark(&read_text(path)?, path)
}

pub fn format_report(reports: &[EpochReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in reports {
        let e = r.exploitability.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{e}\n", r.epoch, r.iterations_total, r.nodes));
    }
    out
}

pub fn write_report(reports: &[EpochReport], path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &format_report(reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::DecisionSchedule;
    use crate::cfr::cfr_iteration;
    use crate::engine::play_deal;
    use crate::policy::fixed_pattern_agent;

    fn table_node() -> CfrNode {
        CfrNode {
            key: InfoSetKey::new(734401).unwrap(),
            legal_mask: [true; 3],
            regret_sum: [-0.598, 2.128, -1.356],
            strategy_sum: [1.359, 1.975, 0.667],
            visits: 12,
        }
    }

    fn p() -> &'static Path {
        Path::new("test")
    }

    #[test]
    fn empty_store_is_header_only() {
        let text = format_store(&NodeStore::new());
        assert_eq!(text, format!("{STORE_HEADER}\n"));
        assert!(parse_store(&text, p()).unwrap().is_empty());
    }

    #[test]
    fn table_node_line() {
        let mut s = NodeStore::new();
        s.insert(table_node()).unwrap();
        let text = format_store(&s);
        assert_eq!(text.lines().nth(1).unwrap(), "734401,111,12,-0.598,2.128,-1.356,1.359,1.975,0.667");
        assert_eq!(parse_store(&text, p()).unwrap(), s);
    }

    #[test]
    fn store_errors_name_line_and_key() {
        let line = "734401,111,1,0,0,0,0,0,0";
        let dup = format!("{STORE_HEADER}\n{line}\n{line}\n");
        let err = parse_store(&dup, p()).unwrap_err().to_string();
        assert!(err.contains(":3:") && err.contains("734401"), "{err}");
        assert!(parse_store("cfrp-store v2 actions=normal,pongpong,qidui\n", p()).is_err());
        assert!(parse_store(&format!("{STORE_HEADER}\n1,111,1,0\n"), p()).is_err());
        assert!(parse_store(&format!("{STORE_HEADER}\n1,101,1,0,5,0,0,0,0\n"), p()).is_err());
        assert!(parse_store("", p()).is_err());
        assert!(parse_store(&format!("{STORE_HEADER}\n1,111,1,NaN,0,0,0,0,0\n"), p()).is_err());
        assert!(parse_store(&format!("{STORE_HEADER}\n1,111,1,0,inf,0,0,0,0\n"), p()).is_err());
    }

    #[test]
    fn trained_store_round_trips_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.txt");
        let mut store = NodeStore::new();
        for seed in 0..30 {
            cfr_iteration(&shuffle_deal(seed), &mut store, &DecisionSchedule::default()).unwrap();
        }
        save_store(&store, &path).unwrap();
        assert_eq!(load_store(&path).unwrap(), store);
        let first = fs::read(&path).unwrap();
        save_store(&store, &path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn log_round_trips() {
        let mut a = fixed_pattern_agent(AbstractAction::QiDui);
        let mut b = fixed_pattern_agent(AbstractAction::Normal);
        let (u, log) = play_deal(&shuffle_deal(3), &mut a, &mut b).unwrap();
        let text = format_log(&log);
        let back = parse_log(&text, p()).unwrap();
        assert_eq!(back, log);
        assert_eq!(format_log(&back), text);
        assert_eq!(back.outcome().unwrap().utilities(), u);
    }

    #[test]
    fn log_errors_carry_line_numbers() {
        let text = "SEED 1\nDRAW 0 3 front\nDISCARD 0\n";
        let err = parse_log(text, p()).unwrap_err().to_string();
        assert!(err.contains(":3:"), "{err}");
        assert!(parse_event("FLY 0").is_err());
        assert!(parse_event("END win 0 qidui 1").is_err());
        assert!(parse_event("PASS 0 3").is_err());
        assert_eq!(parse_event("END drawn").unwrap(), Event::End(Outcome::drawn()));
    }

    #[test]
    fn benchmark_round_trips() {
        let b = Benchmark::generate(4, 7);
        let text = format_benchmark(&b);
        assert!(text.starts_with("cfrp-bench v1 deals=4 seed=7\n"));
        assert_eq!(parse_benchmark(&text, p()).unwrap(), b);
        assert_eq!(Benchmark::generate(4, 7), b);
        let empty = Benchmark::generate(0, 1);
        assert_eq!(format_benchmark(&empty), "cfrp-bench v1 deals=0 seed=1\n");
        assert_eq!(parse_benchmark(&format_benchmark(&empty), p()).unwrap(), empty);
    }

    #[test]
    fn benchmark_rejects_bad_deals() {
        let b = Benchmark::generate(2, 7);
        let mut text = format_benchmark(&b);
        text = text.replacen(" 15", " 14", 1);
        let err = parse_benchmark(&text, p()).unwrap_err().to_string();
        assert!(err.contains(":2:") || err.contains(":3:"), "{err}");
        assert!(parse_benchmark("cfrp-bench v1 deals=3 seed=1\n", p()).is_err());
    }

    #[test]
    fn report_rows() {
        let rows = vec![
            EpochReport { epoch: 1, iterations_total: 5, nodes: 9, exploitability: Some(0.25) },
            EpochReport { epoch: 2, iterations_total: 10, nodes: 11, exploitability: None },
        ];
        assert_eq!(format_report(&rows), format!("{REPORT_HEADER}\n1,5,9,0.25\n2,10,11,\n"));
    }
}
