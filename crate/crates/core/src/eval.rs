//! Exploitability estimate against the fixed-pattern opponents, and the
//! agent that plays a trained store.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::abstraction::{info_set_key, legal_abstract_actions, mask_count, DecisionSchedule};
use crate::cfr::{derive_seed, NodeStore, Strategy};
use crate::engine::{play_deal, Choice, GameState, PlayerId, Selector};
use crate::error::{Error, Result};
use crate::policy::{choose_action, AbstractAction, FixedPatternAgent};
use crate::tiles::Deal;

/// How the agent turns an average strategy into a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Most likely pattern, ties to the lowest index.
    #[default]
    Argmax,
    /// Sampled from the average strategy with a seeded generator.
    Sample(u64),
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalMode::Argmax => f.write_str("argmax"),
            EvalMode::Sample(seed) => write!(f, "sample:{seed}"),
        }
    }
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "argmax" {
            return Ok(EvalMode::Argmax);
        }
        s.strip_prefix("sample:")
            .and_then(|seed| seed.parse().ok())
            .map(EvalMode::Sample)
            .ok_or_else(|| Error::Config(format!("mode must be `argmax` or `sample:SEED`, got `{s}`")))
    }
}

/// Plays a stored strategy. At each decision point it re-reads the node for
/// its information set; unknown keys and forced choices fall back to Normal.
pub struct EvalAgent<'a> {
    store: &'a NodeStore,
    schedule: DecisionSchedule,
    rng: Option<ChaCha8Rng>,
    bound: AbstractAction,
}

impl<'a> EvalAgent<'a> {
    pub fn new(store: &'a NodeStore, mode: EvalMode, schedule: DecisionSchedule) -> Self {
        let rng = match mode {
            EvalMode::Argmax => None,
            EvalMode::Sample(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        EvalAgent {
            store,
            schedule,
            rng,
            bound: AbstractAction::Normal,
        }
    }

    /// Pattern the agent commits to at a decision point of `player`.
    pub fn decide(&mut self, state: &GameState, player: PlayerId) -> AbstractAction {
        let mask = legal_abstract_actions(state, player);
        if mask_count(&mask) < 2 {
            return AbstractAction::Normal;
        }
        let Some(node) = self.store.get(info_set_key(state, player)) else {
            return AbstractAction::Normal;
        };
        let strategy = node
            .average_strategy_in(&mask)
            .expect("mask has at least two actions");
        match &mut self.rng {
            None => strategy.argmax(),
            Some(rng) => sample(&strategy, rng.random::<f64>()),
        }
    }
}

fn sample(strategy: &Strategy, u: f64) -> AbstractAction {
    let mut acc = 0.0;
    let mut last = AbstractAction::Normal;
    for a in AbstractAction::ALL {
        let p = strategy.prob(a);
        if p > 0.0 {
            acc += p;
            last = a;
            if u < acc {
                return a;
            }
        }
    }
    last
}

impl Selector for EvalAgent<'_> {
    fn select(&mut self, state: &GameState) -> Choice {
        let player = state.to_act;
        let mut commit = None;
        if self.schedule.is_decision_point(state, player) {
            self.bound = self.decide(state, player);
            commit = Some(self.bound);
        }
        let action = choose_action(state, player, self.bound).expect("non-terminal state");
        Choice { action, commit }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOptions {
    pub mode: EvalMode,
    pub schedule: DecisionSchedule,
    pub workers: usize,
    /// Opponent set; the full set is all three fixed patterns.
    pub opponents: Vec<AbstractAction>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            mode: EvalMode::Argmax,
            schedule: DecisionSchedule::default(),
            workers: 1,
            opponents: AbstractAction::ALL.to_vec(),
        }
    }
}

/// Mean opponent utilities over a benchmark. All fields are points per game.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub deals: usize,
    /// Mean over deals and seats of the best opponent's utility.
    pub exploitability: f64,
    /// Mean utility of each fixed opponent, indexed by pattern; NaN for
    /// opponents left out of the set.
    pub per_opponent_scores: [f64; 3],
    /// Exploitability with the agent seated as player 0 and as player 1.
    pub seat_breakdown: [f64; 2],
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "deals: {}", self.deals)?;
        writeln!(f, "exploitability (estimate): {:.6}", self.exploitability)?;
        for a in AbstractAction::ALL {
            writeln!(f, "  vs {:<9} {:.6}", a.name(), self.per_opponent_scores[a.index()])?;
        }
        write!(
            f,
            "  seat 0: {:.6}  seat 1: {:.6}",
            self.seat_breakdown[0], self.seat_breakdown[1]
        )
    }
}

/// Opponent utility for every (seat, opponent) pair on one deal.
fn deal_scores(store: &NodeStore, deal: &Deal, index: u64, opts: &EvalOptions) -> Result<[[Option<i32>; 3]; 2]> {
    let mut out = [[None; 3]; 2];
    for seat in 0..2u8 {
        for &opp in &opts.opponents {
            let mode = match opts.mode {
                EvalMode::Argmax => EvalMode::Argmax,
                EvalMode::Sample(seed) => {
                    EvalMode::Sample(derive_seed(seed, index * 6 + seat as u64 * 3 + opp.index() as u64))
                }
            };
            out[seat as usize][opp.index()] = Some(play_vs(store, deal, mode, &opts.schedule, seat, opp)?);
        }
    }
    Ok(out)
}

/// Opponent utility of one game between the agent in `seat` and a fixed
/// `opponent`.
fn play_vs(
    store: &NodeStore,
    deal: &Deal,
    mode: EvalMode,
    schedule: &DecisionSchedule,
    seat: PlayerId,
    opponent: AbstractAction,
) -> Result<i32> {
    let mut agent = EvalAgent::new(store, mode, *schedule);
    let mut fixed = FixedPatternAgent {
        pattern: opponent,
        schedule: *schedule,
    };
    let (u, _) = if seat == 0 {
        play_deal(deal, &mut agent, &mut fixed)?
    } else {
        play_deal(deal, &mut fixed, &mut agent)?
    };
    Ok(u[1 - seat as usize])
}

/// Highest opponent utility over the three fixed opponents when the agent
/// sits in `seat`.
pub fn best_response_score(deal: &Deal, store: &NodeStore, mode: EvalMode, seat: PlayerId) -> Result<f64> {
    if seat > 1 {
        return Err(Error::Config(format!("seat must be 0 or 1, got {seat}")));
    }
    let schedule = DecisionSchedule::default();
    let mut best = i32::MIN;
    for opp in AbstractAction::ALL {
        best = best.max(play_vs(store, deal, mode, &schedule, seat, opp)?);
    }
    Ok(f64::from(best))
}

/// Plays every benchmark deal from both seats against each opponent in the
/// set. Per-deal results are gathered in deal order and summed sequentially,
/// so the report does not depend on the worker count.
pub fn evaluate(store: &NodeStore, benchmark: &[Deal], opts: &EvalOptions) -> Result<EvalReport> {
    if benchmark.is_empty() {
        return Err(Error::Config("benchmark is empty".into()));
    }
    if opts.opponents.is_empty() {
        return Err(Error::Config("opponent set is empty".into()));
    }
    if opts.workers == 0 {
        return Err(Error::Config("workers must be positive".into()));
    }
    let run = || -> Result<Vec<[[Option<i32>; 3]; 2]>> {
        benchmark
            .par_iter()
            .enumerate()
            .map(|(i, deal)| deal_scores(store, deal, i as u64, opts))
            .collect()
    };
    let scores = if opts.workers == 1 {
        benchmark
            .iter()
            .enumerate()
            .map(|(i, deal)| deal_scores(store, deal, i as u64, opts))
            .collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(run)?
    };

    let n = benchmark.len() as f64;
    let mut seat_sum = [0i64; 2];
    let mut opp_sum = [0i64; 3];
    for per_deal in &scores {
        for (seat, row) in per_deal.iter().enumerate() {
            seat_sum[seat] += row.iter().flatten().copied().max().expect("non-empty set") as i64;
            for (o, v) in row.iter().enumerate() {
                opp_sum[o] += v.unwrap_or(0) as i64;
            }
        }
    }
    let seat_breakdown = seat_sum.map(|s| s as f64 / n);
    let mut per_opponent_scores = [f64::NAN; 3];
    for &o in &opts.opponents {
        per_opponent_scores[o.index()] = opp_sum[o.index()] as f64 / (2.0 * n);
    }
    Ok(EvalReport {
        deals: benchmark.len(),
        exploitability: (seat_breakdown[0] + seat_breakdown[1]) / 2.0,
        per_opponent_scores,
        seat_breakdown,
    })
}
