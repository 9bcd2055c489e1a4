//! Command-line front end. `run` parses arguments, dispatches to a command
//! and maps errors to exit codes: 0 ok, 1 usage, 2 I/O or format, 3
//! internal.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::abstraction::{decode, mask_actions, DecisionSchedule, InfoSetKey};
use crate::cfr::{average_strategy, train, NodeStore, TrainConfig};
use crate::engine::{play_deal, DrawEnd, Event, GameLog, PlayerId};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalAgent, EvalMode, EvalOptions};
use crate::patterns::Meld;
use crate::persistence::{load_store, read_benchmark, read_log, write_benchmark, write_log, Benchmark};
use crate::policy::{fixed_pattern_agent, AbstractAction};
use crate::tiles::{shuffle_deal, Hand, TileKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cfrp", version, about = "Pattern-level CFR for two-player Mahjong")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a node store with chance-sampled CFR.
    Train(TrainArgs),
    /// Estimate exploitability of a store on a benchmark.
    Eval(EvalArgs),
    /// Play one game between a store and a fixed-pattern opponent.
    Play(PlayArgs),
    /// Render a game log turn by turn with both hands open.
    Replay(ReplayArgs),
    /// Write a benchmark of seeded deals.
    BenchGen(BenchGenArgs),
    /// Show the stored node for a key, or list all nodes.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub iterations: usize,
    #[arg(long)]
    pub epoch_size: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    /// Benchmark scored after every epoch; the exploitability column stays
    /// empty without one.
    #[arg(long)]
    pub benchmark: Option<PathBuf>,
    #[arg(long, default_value = "1,7,13")]
    pub decision_turns: DecisionSchedule,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub benchmark: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// `argmax` or `sample:SEED`.
    #[arg(long, default_value = "argmax")]
    pub mode: EvalMode,
    #[arg(long, default_value = "1,7,13")]
    pub decision_turns: DecisionSchedule,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub log: PathBuf,
    /// `normal`, `pongpong` or `qidui`.
    #[arg(long, value_parser = parse_pattern)]
    pub opponent: AbstractAction,
    /// Seat of the store-driven agent.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub seat: u8,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub log: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchGenArgs {
    #[arg(long)]
    pub deals: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub key: Option<InfoSetKey>,
}

fn parse_pattern(s: &str) -> std::result::Result<AbstractAction, String> {
    AbstractAction::from_name(s).ok_or_else(|| format!("expected normal, pongpong or qidui, got `{s}`"))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::FeatureRange(_) => EXIT_USAGE,
        Error::Io { .. } | Error::Format { .. } | Error::MalformedDeal(_) => EXIT_IO,
        Error::Epoch { source, .. } => exit_code(source),
        _ => EXIT_INTERNAL,
    }
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command and returns what it prints.
pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Play(a) => cmd_play(a),
        Command::Replay(a) => render_log(&read_log(&a.log)?),
        Command::BenchGen(a) => cmd_bench_gen(a),
        Command::Inspect(a) => cmd_inspect(a),
    }
}

fn cmd_train(a: &TrainArgs) -> Result<String> {
    if a.epoch_size == 0 || a.workers == 0 {
        return Err(Error::Config("--epoch-size and --workers must be positive".into()));
    }
    let benchmark = match &a.benchmark {
        Some(p) => read_benchmark(p)?.deals,
        None => Vec::new(),
    };
    let config = TrainConfig {
        schedule: a.decision_turns,
        benchmark,
        store_path: Some(a.store.clone()),
        report_path: Some(a.report.clone()),
        workers: a.workers,
        ..TrainConfig::new(a.iterations, a.epoch_size, a.seed)
    };
    let mut store = NodeStore::new();
    let reports = train(&config, &mut store)?;
    let mut out = String::new();
    for r in &reports {
        let e = r.exploitability.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
        writeln!(out, "epoch {} iterations {} nodes {} exploitability {e}", r.epoch, r.iterations_total, r.nodes).unwrap();
    }
    writeln!(out, "store: {} nodes -> {}", store.len(), a.store.display()).unwrap();
    Ok(out)
}

fn cmd_eval(a: &EvalArgs) -> Result<String> {
    if a.workers == 0 {
        return Err(Error::Config("--workers must be positive".into()));
    }
    let store = load_store(&a.store)?;
    let bench = read_benchmark(&a.benchmark)?;
    let opts = EvalOptions {
        mode: a.mode,
        schedule: a.decision_turns,
        workers: a.workers,
        ..EvalOptions::default()
    };
    let report = evaluate(&store, &bench.deals, &opts)?;
    Ok(format!("{report}\n"))
}

fn cmd_play(a: &PlayArgs) -> Result<String> {
    let store = load_store(&a.store)?;
    let deal = shuffle_deal(a.seed);
    let mut agent = EvalAgent::new(&store, EvalMode::Argmax, DecisionSchedule::default());
    let mut fixed = fixed_pattern_agent(a.opponent);
    let (u, log) = if a.seat == 0 {
        play_deal(&deal, &mut agent, &mut fixed)?
    } else {
        play_deal(&deal, &mut fixed, &mut agent)?
    };
    write_log(&log, &a.log)?;
    Ok(format!(
        "agent seat {} vs {}: utilities {} {}\nlog -> {}\n",
        a.seat,
        a.opponent,
        u[0],
        u[1],
        a.log.display()
    ))
}

fn cmd_bench_gen(a: &BenchGenArgs) -> Result<String> {
    let bench = Benchmark::generate(a.deals, a.seed);
    write_benchmark(&bench, &a.out)?;
    Ok(format!("{} deals -> {}\n", a.deals, a.out.display()))
}

fn fmt_vec(v: &[f64; 3]) -> String {
    format!("{} {} {}", v[0], v[1], v[2])
}

fn cmd_inspect(a: &InspectArgs) -> Result<String> {
    let store = load_store(&a.store)?;
    let mut out = String::new();
    let Some(key) = a.key else {
        writeln!(out, "{} nodes", store.len()).unwrap();
        for n in store.iter() {
            let avg = average_strategy(n);
            writeln!(out, "{} {} visits={} avg={}", n.key, decode(n.key), n.visits, fmt_vec(&avg.0)).unwrap();
        }
        return Ok(out);
    };
    let node = store
        .get(key)
        .ok_or_else(|| Error::Config(format!("key {key} not in store {}", a.store.display())))?;
    let legal: Vec<&str> = mask_actions(&node.legal_mask).map(AbstractAction::name).collect();
    writeln!(out, "key {key}").unwrap();
    writeln!(out, "features {}", decode(key)).unwrap();
    writeln!(out, "legal {} ({} actions)", legal.join(","), legal.len()).unwrap();
    writeln!(out, "visits {}", node.visits).unwrap();
    writeln!(out, "regret_sum {}", fmt_vec(&node.regret_sum)).unwrap();
    writeln!(out, "strategy_sum {}", fmt_vec(&node.strategy_sum)).unwrap();
    writeln!(out, "average {}", fmt_vec(&average_strategy(node).0)).unwrap();
    Ok(out)
}

struct Board {
    hands: [Hand; 2],
    melds: [Vec<Meld>; 2],
    discards: [Vec<TileKind>; 2],
    round: u32,
}

impl Board {
    fn take(&mut self, p: PlayerId, kind: TileKind, n: u8, line: usize) -> Result<()> {
        if self.hands[p as usize].remove(kind, n) {
            Ok(())
        } else {
            Err(Error::format("log", line, format!("player {p} does not hold {n}x {kind}")))
        }
    }

    fn seize(&mut self, p: PlayerId, line: usize) -> Result<TileKind> {
        self.discards[1 - p as usize]
            .pop()
            .ok_or_else(|| Error::format("log", line, "claim with no discard to seize"))
    }

    fn render(&self, out: &mut String) {
        for p in 0..2 {
            let melds: Vec<String> = self.melds[p].iter().map(Meld::to_string).collect();
            let river: Vec<&str> = self.discards[p].iter().map(|k| k.name()).collect();
            writeln!(out, "    P{p} hand: {}", self.hands[p]).unwrap();
            if !melds.is_empty() {
                writeln!(out, "       melds: {}", melds.join(" ")).unwrap();
            }
            writeln!(out, "       river: {}", river.join(" ")).unwrap();
        }
    }
}

/// ASCII rendering of a log. Hands are tracked event by event; a log whose
/// moves do not fit the tracked hands is rejected with its line number.
pub fn render_log(log: &GameLog) -> Result<String> {
    let mut b = Board {
        hands: [Hand::new(); 2],
        melds: [Vec::new(), Vec::new()],
        discards: [Vec::new(), Vec::new()],
        round: 0,
    };
    let mut out = String::new();
    let mut ended = false;
    for (i, e) in log.events.iter().enumerate() {
        let line = i + 1;
        if ended {
            return Err(Error::format("log", line, "event after END"));
        }
        match e {
            Event::Seed(s) => writeln!(out, "deal seed {s}").unwrap(),
            Event::Hand { player, tiles } => {
                b.hands[*player as usize] = Hand::from_tiles(tiles).map_err(|e| Error::format("log", line, e.to_string()))?;
                writeln!(out, "P{player} dealt {}", b.hands[*player as usize]).unwrap();
            }
            Event::Draw { player, tile, end } => {
                b.round += 1;
                b.hands[*player as usize].add(*tile);
                let from = if *end == DrawEnd::Back { " (replacement)" } else { "" };
                writeln!(out, "[{:02}] P{player} draws {tile}{from}", b.round).unwrap();
            }
            Event::Discard { player, tile } => {
                b.take(*player, *tile, 1, line)?;
                b.discards[*player as usize].push(*tile);
                writeln!(out, "     P{player} discards {tile}").unwrap();
                b.render(&mut out);
            }
            Event::Chow { player, base } => {
                let seized = b.seize(*player, line)?;
                let meld = Meld::chow(*base).map_err(|e| Error::format("log", line, e.to_string()))?;
                if meld.tiles_of(seized) != 1 {
                    return Err(Error::format("log", line, format!("chow {meld} does not use {seized}")));
                }
                for k in base.index()..base.index() + 3 {
                    let k = TileKind::new(k as u8)?;
                    if k != seized {
                        b.take(*player, k, 1, line)?;
                    }
                }
                writeln!(out, "     P{player} chows {seized} into {meld}").unwrap();
                b.melds[*player as usize].push(meld);
            }
            Event::Pong { player, tile } => {
                let seized = b.seize(*player, line)?;
                if seized != *tile {
                    return Err(Error::format("log", line, format!("pong of {tile} but last discard was {seized}")));
                }
                b.take(*player, *tile, 2, line)?;
                b.melds[*player as usize].push(Meld::pong(*tile));
                writeln!(out, "     P{player} pongs {tile}").unwrap();
            }
            Event::Kong { player, tile, concealed } => {
                if *concealed {
                    b.take(*player, *tile, 4, line)?;
                } else {
                    let seized = b.seize(*player, line)?;
                    if seized != *tile {
                        return Err(Error::format("log", line, format!("kong of {tile} but last discard was {seized}")));
                    }
                    b.take(*player, *tile, 3, line)?;
                }
                b.melds[*player as usize].push(Meld::kong(*tile, !concealed));
                let how = if *concealed { "concealed" } else { "exposed" };
                writeln!(out, "     P{player} declares {how} kong of {tile}").unwrap();
            }
            Event::Pass { player, phase } => writeln!(out, "     P{player} passes (phase {})", phase.index()).unwrap(),
            Event::Policy { player, round, pattern } => {
                writeln!(out, "     P{player} commits to {pattern} at round {round}").unwrap()
            }
            Event::End(o) => {
                ended = true;
                writeln!(out, "final board:").unwrap();
                b.render(&mut out);
                let u = o.utilities();
                let head = match o.winner {
                    Some(w) => format!("END win {w} {} {}", o.pattern.name(), o.points),
                    None => "END drawn".to_string(),
                };
                writeln!(out, "{head} utilities {} {}", u[0], u[1]).unwrap();
            }
        }
    }
    if !ended {
        return Err(Error::format("log", log.events.len() + 1, "log has no END event"));
    }
    Ok(out)
}
